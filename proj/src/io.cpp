#include "phasemeter/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace phasemeter {

namespace {

Json axis_to_json(const Axis& a) {
    return Json{{"min", a.min}, {"step", a.step}, {"n", a.n}};
}

Axis axis_from_json(const Json& j) {
    Axis a{j.at("min").get<double>(), j.at("step").get<double>(), j.at("n").get<int>()};
    if (a.n < 1 || !(a.step > 0.0)) throw IoError("axis: invalid n or step");
    return a;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Json grid_to_json(const PhaseSpaceGrid& g) {
    std::vector<double> vals(g.values.size());
    for (int i = 0; i < g.xAxis.n; ++i)
        for (int j = 0; j < g.pAxis.n; ++j)
            vals[std::size_t(i) * g.pAxis.n + j] = g.values(i, j);
    return Json{{"xAxis", axis_to_json(g.xAxis)},
                {"pAxis", axis_to_json(g.pAxis)},
                {"lambda", g.lambda},
                {"values", vals}};
}

PhaseSpaceGrid grid_from_json(const Json& j) {
    PhaseSpaceGrid g;
    g.xAxis = axis_from_json(j.at("xAxis"));
    g.pAxis = axis_from_json(j.at("pAxis"));
    g.lambda = j.at("lambda").get<double>();
    const auto& vals = j.at("values");
    if (vals.size() != std::size_t(g.xAxis.n) * g.pAxis.n)
        throw IoError("grid: values length does not match axes");
    g.values.resize(g.xAxis.n, g.pAxis.n);
    for (int i = 0; i < g.xAxis.n; ++i)
        for (int jj = 0; jj < g.pAxis.n; ++jj)
            g.values(i, jj) = vals[std::size_t(i) * g.pAxis.n + jj].get<double>();
    return g;
}

Json state_to_json(const StateVector& s) {
    Json amps = Json::array();
    for (int n = 0; n < s.dim(); ++n)
        amps.push_back({s.amplitudes[n].real(), s.amplitudes[n].imag()});
    return Json{{"amplitudes", amps}, {"lambda", s.lengthScale}};
}

StateVector state_from_json(const Json& j) {
    const auto& amps = j.at("amplitudes");
    Vec v(amps.size());
    for (std::size_t n = 0; n < amps.size(); ++n)
        v[Eigen::Index(n)] = Complex(amps[n].at(0).get<double>(), amps[n].at(1).get<double>());
    return {v, j.at("lambda").get<double>()};
}

Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw IoError("matrix: expected non-empty array");
    Mat m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != std::size_t(m.cols())) throw IoError("matrix: ragged rows");
        for (std::size_t k = 0; k < j[i].size(); ++k)
            m(Eigen::Index(i), Eigen::Index(k)) =
                Complex(j[i][k].at(0).get<double>(), j[i][k].at(1).get<double>());
    }
    return m;
}

Json error_report_to_json(const ErrorReport& r) {
    return Json{{"deltaX", r.deltaX},
                {"deltaP", r.deltaP},
                {"product", r.product},
                {"biasX", r.biasX},
                {"biasP", r.biasP},
                {"resolutionLambda", r.resolutionLambda},
                {"regime", r.regime == Regime::Retrodictive ? "retrodictive" : "predictive"},
                {"edgeConcentrated", r.edgeConcentrated},
                {"supLevelX", r.supLevelX},
                {"supLevelP", r.supLevelP},
                {"truncationDim", r.truncationDim}};
}

Json equality_report_to_json(const EqualityReport& r) {
    return Json{{"maxMomentDiff", r.maxMomentDiff},
                {"maxCharDiff", r.maxCharDiff},
                {"l1Distance", r.l1Distance},
                {"maxOrder", r.maxOrder},
                {"verdict", r.verdict}};
}

Json moment_table_to_json(const MomentTable& t) {
    return Json{{"maxOrder", t.maxOrder}, {"moments", matrix_to_json(t.moments)}};
}

Json outcome_to_json(const OutcomeDistribution& d) {
    std::vector<double> vals(d.density.data(), d.density.data() + d.density.size());
    return Json{{"muAxis", axis_to_json(d.mu)}, {"density", vals}};
}

void write_grid_csv(const std::string& path, const PhaseSpaceGrid& g) {
    std::ostringstream os;
    os << "# nx=" << g.xAxis.n << " np=" << g.pAxis.n << " x0=" << fmt_double(g.xAxis.min)
       << " dx=" << fmt_double(g.xAxis.step) << " p0=" << fmt_double(g.pAxis.min)
       << " dp=" << fmt_double(g.pAxis.step) << " lambda=" << fmt_double(g.lambda) << "\n";
    os << "muX,muP,value\n";
    for (int i = 0; i < g.xAxis.n; ++i)
        for (int j = 0; j < g.pAxis.n; ++j)
            os << fmt_double(g.xAxis.at(i)) << ',' << fmt_double(g.pAxis.at(j)) << ','
               << fmt_double(g.values(i, j)) << "\n";
    write_text(path, os.str());
}

PhaseSpaceGrid read_grid_csv(const std::string& path) {
    std::istringstream is(read_text(path));
    std::string header;
    if (!std::getline(is, header) || header.rfind("# ", 0) != 0)
        throw IoError(path + ": missing grid metadata header");
    PhaseSpaceGrid g;
    int nx = 0, np = 0;
    {
        std::istringstream hs(header.substr(2));
        std::string tok;
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw IoError(path + ": malformed header token " + tok);
            std::string key = tok.substr(0, eq);
            double val = std::stod(tok.substr(eq + 1));
            if (key == "nx") nx = int(val);
            else if (key == "np") np = int(val);
            else if (key == "x0") g.xAxis.min = val;
            else if (key == "dx") g.xAxis.step = val;
            else if (key == "p0") g.pAxis.min = val;
            else if (key == "dp") g.pAxis.step = val;
            else if (key == "lambda") g.lambda = val;
            else throw IoError(path + ": unknown header key " + key);
        }
    }
    if (nx < 1 || np < 1) throw IoError(path + ": header missing nx/np");
    g.xAxis.n = nx;
    g.pAxis.n = np;
    std::string line;
    if (!std::getline(is, line) || line != "muX,muP,value")
        throw IoError(path + ": missing column header");
    g.values.resize(nx, np);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < np; ++j) {
            if (!std::getline(is, line)) throw IoError(path + ": truncated data rows");
            auto c1 = line.find(',');
            auto c2 = line.find(',', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw IoError(path + ": malformed data row: " + line);
            g.values(i, j) = std::stod(line.substr(c2 + 1));
        }
    return g;
}

PhaseSpaceGrid read_grid(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".json") return grid_from_json(read_json(path));
    if (ext == ".csv") return read_grid_csv(path);
    throw IoError(path + ": unsupported grid format (expected .json or .csv)");
}

void write_outcome_csv(const std::string& path, const OutcomeDistribution& d) {
    std::ostringstream os;
    os << "# n=" << d.mu.n << " mu0=" << fmt_double(d.mu.min)
       << " dmu=" << fmt_double(d.mu.step) << "\n";
    os << "mu,density\n";
    for (int i = 0; i < d.mu.n; ++i)
        os << fmt_double(d.mu.at(i)) << ',' << fmt_double(d.density[i]) << "\n";
    write_text(path, os.str());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_json(const std::string& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

Json read_json(const std::string& path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

}  // namespace phasemeter
