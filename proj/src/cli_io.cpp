#include "omloc/cli_io.hpp"

#include "omloc/formulations.hpp"
#include "omloc/oracle.hpp"
#include "omloc/symmetry.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace omloc {

using json = nlohmann::json;

ParseError::ParseError(const std::string& field, int line, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? "" : "field '" + field + "': ") + message),
      field_(field),
      message_(message),
      line_(line) {}

namespace {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same_points(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
    return true;
}

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
    const std::size_t pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

std::string fmt(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

json points_json(const std::vector<Point>& pts) {
    json arr = json::array();
    for (const auto& p : pts) {
        json row = json::array();
        for (int k = 0; k < p.size(); ++k) row.push_back(p[k]);
        arr.push_back(row);
    }
    return arr;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        arr.push_back(row);
    }
    return arr;
}

json vector_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

const char* kBenchmarkText =
    "9.46 9.36 9.39 6.44 9.27 1.49 9.20 8.69 8.99 2.45 8.93 7.00 8.86 8.74 8.60 0.53 8.53 7.04 8.45 0.69 "
    "7.67 4.17 7.55 5.79 7.43 1.61 7.36 4.03 7.34 1.38 7.31 1.61 7.23 7.05 6.75 5.57 6.70 2.77 6.63 5.23 "
    "6.58 4.49 6.49 6.22 6.37 7.02 6.27 3.66 6.08 1.34 5.89 8.06 5.57 4.60 5.00 9.00 4.53 7.87 4.46 7.91 "
    "4.18 3.74 4.01 0.31 3.57 1.99 3.54 7.06 3.39 5.65 3.34 4.01 3.33 5.78 3.13 1.92 2.83 9.88 2.22 4.35 "
    "2.20 1.12 1.90 8.35 1.89 0.77 1.74 1.37 1.68 6.45 1.33 8.89 1.24 6.69 1.13 5.25 0.88 1.02 0.75 4.98";

}  // namespace

bool ProblemFile::operator==(const ProblemFile& o) const {
    return points_path == o.points_path && dataset == o.dataset && subset == o.subset &&
           same_points(points, o.points) && variant == o.variant && tau == o.tau && p == o.p &&
           lambda_preset == o.lambda_preset && same_matrix(lambda, o.lambda) && same_matrix(lambda_ni, o.lambda_ni) &&
           same_matrix(omega, o.omega) && same_matrix(mu, o.mu) && settings == o.settings;
}

std::vector<Point> parse_points_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    int d = -1;
    std::vector<Point> pts;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        if (d < 0) {
            for (std::size_t k = 0; k < cells.size(); ++k)
                if (cells[k] != "x" + std::to_string(k + 1))
                    throw ParseError("header", lineno, "expected header x1,...,xd, got '" + line + "'");
            d = static_cast<int>(cells.size());
            continue;
        }
        if (static_cast<int>(cells.size()) != d)
            throw ParseError("points", lineno, "expected " + std::to_string(d) + " coordinates");
        Point p(d);
        for (int k = 0; k < d; ++k) {
            std::size_t used = 0;
            try {
                p[k] = std::stod(cells[k], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cells[k].size() || !std::isfinite(p[k]))
                throw ParseError("x" + std::to_string(k + 1), lineno, "not a number: '" + cells[k] + "'");
        }
        pts.push_back(p);
    }
    if (d < 0) throw ParseError("header", lineno, "empty points file");
    if (pts.empty()) throw ParseError("points", lineno, "no points");
    return pts;
}

std::string print_points_csv(const std::vector<Point>& points) {
    std::ostringstream os;
    const int d = points.empty() ? 0 : static_cast<int>(points.front().size());
    for (int k = 0; k < d; ++k) os << (k ? "," : "") << "x" << k + 1;
    os << "\n" << std::setprecision(17);
    for (const auto& p : points) {
        for (int k = 0; k < d; ++k) os << (k ? "," : "") << p[k];
        os << "\n";
    }
    return os.str();
}

NormExponent parse_tau(const std::string& text) {
    try {
        return NormExponent::parse(trim(text));
    } catch (const std::invalid_argument& e) {
        throw ParseError("tau", 0, e.what());
    }
}

SAWeights parse_lambda_preset(const std::string& preset, int n) {
    try {
        if (preset == "median") return lambda_preset(LambdaKind::Median, n);
        if (preset == "center") return lambda_preset(LambdaKind::Center, n);
        if (preset.rfind("kcentrum:", 0) == 0) {
            std::size_t used = 0;
            const std::string num = preset.substr(9);
            const int k = std::stoi(num, &used);
            if (used != num.size()) throw std::invalid_argument("bad k");
            return lambda_preset(LambdaKind::KCentrum, n, k);
        }
    } catch (const std::exception& e) {
        throw ParseError("lambda", 0, "bad preset '" + preset + "': " + e.what());
    }
    throw ParseError("lambda", 0, "unknown preset '" + preset + "' (median, center, kcentrum:k)");
}

ProblemFile parse_problem(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    if (!j.is_object()) throw ParseError("", 1, "problem file must be a JSON object");
    ProblemFile pf;
    std::string field;
    auto fail = [&](const std::string& f, const std::string& msg) -> ParseError {
        return ParseError(f, line_of_key(text, f), msg);
    };
    static const std::vector<std::string> known = {"variant", "points", "points_file", "dataset", "subset", "tau",
                                                   "p",       "lambda", "omega",       "mu",      "settings"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) throw fail(it.key(), "unknown field");
    try {
        field = "variant";
        const std::string variant = j.value("variant", std::string("sa"));
        if (variant == "sa") pf.variant = Variant::SingleAllocation;
        else if (variant == "ni") pf.variant = Variant::NonInterchangeable;
        else throw fail("variant", "expected 'ni' or 'sa'");

        const int sources = static_cast<int>(j.contains("points")) + static_cast<int>(j.contains("points_file")) +
                            static_cast<int>(j.contains("dataset"));
        if (sources != 1) throw fail("points", "give exactly one of points, points_file, dataset");
        if (j.contains("points")) {
            field = "points";
            for (const auto& row : j.at("points")) {
                std::vector<double> c = row.get<std::vector<double>>();
                pf.points.push_back(Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<long>(c.size())));
            }
        } else if (j.contains("points_file")) {
            field = "points_file";
            pf.points_path = j.at("points_file").get<std::string>();
            std::filesystem::path path(pf.points_path);
            if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
            std::ifstream in(path);
            if (!in) throw fail("points_file", "cannot open '" + path.string() + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                pf.points = parse_points_csv(ss.str());
            } catch (const ParseError& e) {
                throw ParseError(e.field(), e.line(), path.string() + ": " + e.message());
            }
        } else {
            field = "dataset";
            pf.dataset = j.at("dataset").get<std::string>();
            if (pf.dataset != "eilon-watson") throw fail("dataset", "unknown dataset '" + pf.dataset + "'");
            const auto& all = benchmark_points();
            if (j.contains("subset")) {
                field = "subset";
                pf.subset = j.at("subset").get<std::vector<int>>();
                for (int q : pf.subset) {
                    if (q < 0 || q >= static_cast<int>(all.size())) throw fail("subset", "index out of range");
                    pf.points.push_back(all[q]);
                }
            } else pf.points = all;
        }
        if (pf.points.empty()) throw fail(field, "no points");
        const long d = pf.points.front().size();
        if (d < 1) throw fail(field, "points need at least one coordinate");
        for (const auto& p : pf.points)
            if (p.size() != d) throw fail(field, "points have different dimensions");
        const int n = static_cast<int>(pf.points.size());

        field = "tau";
        if (j.contains("tau")) {
            const auto& t = j.at("tau");
            if (t.is_string()) pf.tau = t.get<std::string>();
            else if (t.is_number()) {
                std::ostringstream os;
                os << std::setprecision(17) << t.get<double>();
                pf.tau = os.str();
            } else throw fail("tau", "expected \"r/s\" or a number");
        }
        try {
            parse_tau(pf.tau);
        } catch (const ParseError& e) {
            throw fail("tau", e.message());
        }

        field = "p";
        pf.p = j.value("p", 1);
        if (pf.p < 1) throw fail("p", "must be >= 1");

        field = "lambda";
        if (!j.contains("lambda")) {
            if (pf.variant == Variant::SingleAllocation) pf.lambda_preset = "median";
            else throw fail("lambda", "NI problems need an explicit n x p lambda matrix");
        }
        if (j.contains("lambda") && j.at("lambda").is_string()) {
            if (pf.variant != Variant::SingleAllocation) throw fail("lambda", "presets apply to sa problems");
            pf.lambda_preset = j.at("lambda").get<std::string>();
        }
        if (!pf.lambda_preset.empty()) {
            try {
                pf.lambda = parse_lambda_preset(pf.lambda_preset, n).lambda;
            } catch (const ParseError& e) {
                throw fail("lambda", e.message());
            }
        } else if (pf.variant == Variant::SingleAllocation) {
            std::vector<double> v = j.at("lambda").get<std::vector<double>>();
            if (static_cast<int>(v.size()) != n) throw fail("lambda", "expected " + std::to_string(n) + " weights");
            pf.lambda = Eigen::Map<Eigen::VectorXd>(v.data(), n);
        } else {
            auto rows = j.at("lambda").get<std::vector<std::vector<double>>>();
            if (static_cast<int>(rows.size()) != n) throw fail("lambda", "expected " + std::to_string(n) + " rows");
            pf.lambda_ni.resize(n, pf.p);
            for (int i = 0; i < n; ++i) {
                if (static_cast<int>(rows[i].size()) != pf.p) throw fail("lambda", "expected p columns per row");
                for (int q = 0; q < pf.p; ++q) pf.lambda_ni(i, q) = rows[i][q];
            }
        }
        if (j.contains("omega")) {
            field = "omega";
            std::vector<double> v = j.at("omega").get<std::vector<double>>();
            if (static_cast<int>(v.size()) != n) throw fail("omega", "expected " + std::to_string(n) + " weights");
            pf.omega = Eigen::Map<Eigen::VectorXd>(v.data(), n);
        }
        if (j.contains("mu")) {
            field = "mu";
            auto rows = j.at("mu").get<std::vector<std::vector<double>>>();
            if (static_cast<int>(rows.size()) != pf.p) throw fail("mu", "expected a p x p matrix");
            pf.mu.resize(pf.p, pf.p);
            for (int a = 0; a < pf.p; ++a) {
                if (static_cast<int>(rows[a].size()) != pf.p) throw fail("mu", "expected a p x p matrix");
                for (int b = 0; b < pf.p; ++b) pf.mu(a, b) = rows[a][b];
            }
        }
        if (j.contains("settings")) {
            field = "settings";
            const json& s = j.at("settings");
            if (!s.is_object()) throw fail("settings", "expected an object");
            for (auto it = s.begin(); it != s.end(); ++it) {
                const std::string& key = it.key();
                field = key;
                if (key == "tol") pf.settings.tol = it->get<double>();
                else if (key == "gap") pf.settings.gap = it->get<double>();
                else if (key == "time_limit") pf.settings.time_limit = it->get<double>();
                else if (key == "workers") pf.settings.workers = it->get<int>();
                else if (key == "seed") pf.settings.seed = it->get<unsigned>();
                else if (key == "ala_starts") pf.settings.ala_starts = it->get<int>();
                else throw fail(key, "unknown setting");
            }
            if (pf.settings.tol <= 0 || pf.settings.gap < 0 || pf.settings.time_limit <= 0 || pf.settings.workers < 1 ||
                pf.settings.ala_starts < 0)
                throw fail("settings", "out of range");
        }
    } catch (const json::exception& e) {
        throw fail(field, e.what());
    }
    try {
        to_instance(pf);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError("", 0, std::string("invalid instance: ") + e.what());
    }
    return pf;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", 0, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string print_problem(const ProblemFile& pf) {
    json j = json::object();
    j["variant"] = pf.variant == Variant::SingleAllocation ? "sa" : "ni";
    if (!pf.points_path.empty()) j["points_file"] = pf.points_path;
    else if (!pf.dataset.empty()) {
        j["dataset"] = pf.dataset;
        if (!pf.subset.empty()) j["subset"] = pf.subset;
    } else j["points"] = points_json(pf.points);
    j["tau"] = pf.tau;
    j["p"] = pf.p;
    if (!pf.lambda_preset.empty()) j["lambda"] = pf.lambda_preset;
    else if (pf.variant == Variant::SingleAllocation) j["lambda"] = vector_json(pf.lambda);
    else j["lambda"] = matrix_json(pf.lambda_ni);
    if (pf.omega.size() > 0) j["omega"] = vector_json(pf.omega);
    if (pf.mu.size() > 0) j["mu"] = matrix_json(pf.mu);
    j["settings"] = {{"tol", pf.settings.tol},
                     {"gap", pf.settings.gap},
                     {"time_limit", pf.settings.time_limit},
                     {"workers", pf.settings.workers},
                     {"seed", pf.settings.seed},
                     {"ala_starts", pf.settings.ala_starts}};
    return j.dump(2) + "\n";
}

Instance to_instance(const ProblemFile& pf) {
    const NormExponent norm = parse_tau(pf.tau);
    if (pf.variant == Variant::SingleAllocation) return make_sa_instance(pf.points, norm, pf.p, pf.lambda);
    NIWeights w;
    const int n = static_cast<int>(pf.points.size());
    w.omega = pf.omega.size() > 0 ? pf.omega : Eigen::VectorXd::Ones(n);
    w.lambda = pf.lambda_ni;
    w.mu = pf.mu.size() > 0 ? pf.mu : Eigen::MatrixXd::Zero(pf.p, pf.p);
    return make_ni_instance(pf.points, norm, pf.p, w);
}

const std::vector<Point>& benchmark_points() {
    static const std::vector<Point> pts = [] {
        std::vector<Point> out;
        std::istringstream is(kBenchmarkText);
        double a = 0, b = 0;
        while (is >> a >> b) out.push_back(Point{{a, b}});
        return out;
    }();
    return pts;
}

std::uint64_t points_checksum(const std::vector<Point>& points) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& p : points) {
        std::string line;
        for (int k = 0; k < p.size(); ++k) line += (k ? " " : "") + fmt(p[k], 2);
        line += "\n";
        for (unsigned char c : line) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

const std::uint64_t kBenchmarkChecksum = 0xe965735a8f6e80d9ULL;

SolveReport solve_problem(const ProblemFile& pf, std::ostream* log) {
    const Instance inst = to_instance(pf);
    SolveReport rep;
    rep.variant = inst.variant;
    rep.points = inst.demand.points;
    const auto t0 = std::chrono::steady_clock::now();
    SolverSettings conic;
    conic.tol = pf.settings.tol;
    conic.time_limit = pf.settings.time_limit;
    if (inst.variant == Variant::NonInterchangeable) {
        const NiProgram ni = build_ni(inst);
        const Solution sol = solve(ni.prog, conic);
        rep.status = sol.status == SolveStatus::Optimal ? "optimal" : to_string(sol.status);
        rep.nodes = 0;
        if (sol.x.size() > 0) {
            for (int j = 0; j < inst.p; ++j) {
                Point x(inst.d());
                for (int k = 0; k < inst.d(); ++k) x[k] = sol.x[ni.x[j][k]];
                rep.facilities.push_back(x);
            }
            rep.objective = eval_ni(rep.facilities, inst).objective;
            rep.bound = sol.dual_objective;
            rep.gap = std::max(0.0, rep.objective - rep.bound) / std::max(1.0, std::abs(rep.objective));
        }
    } else {
        BnbSettings st;
        st.gap_tol = pf.settings.gap;
        st.time_limit = pf.settings.time_limit;
        st.threads = pf.settings.workers;
        st.seed = pf.settings.seed;
        st.ala_starts = pf.settings.ala_starts;
        st.conic = conic;
        st.conic.time_limit = 0.0;
        st.log = log;
        const BnbResult res = solve_misocp(inst, st);
        rep.objective = res.incumbent.objective;
        rep.bound = res.best_bound;
        rep.gap = res.gap;
        rep.nodes = res.stats.nodes;
        rep.facilities = res.incumbent.x;
        rep.assignment = res.incumbent.assignment;
        if (!res.incumbent.valid()) rep.status = "no incumbent";
        else if (res.gap > st.gap_tol) rep.status = res.stats.time_limit_hit ? "time limit" : "node limit";
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string report_json(const SolveReport& r, bool include_time) {
    json j = json::object();
    j["variant"] = r.variant == Variant::SingleAllocation ? "sa" : "ni";
    j["status"] = r.status;
    j["objective"] = r.objective;
    j["bound"] = r.bound;
    j["gap"] = r.gap;
    j["nodes"] = r.nodes;
    if (include_time) j["seconds"] = r.seconds;
    j["facilities"] = points_json(r.facilities);
    j["assignment"] = r.assignment;
    j["points"] = points_json(r.points);
    return j.dump(2) + "\n";
}

SolveReport parse_report(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    SolveReport r;
    std::string field;
    try {
        field = "variant";
        r.variant = j.value("variant", std::string("sa")) == "ni" ? Variant::NonInterchangeable : Variant::SingleAllocation;
        field = "status";
        r.status = j.value("status", std::string("optimal"));
        field = "objective";
        r.objective = j.value("objective", 0.0);
        r.bound = j.value("bound", 0.0);
        r.gap = j.value("gap", 0.0);
        r.nodes = j.value("nodes", 0LL);
        r.seconds = j.value("seconds", 0.0);
        for (const char* key : {"facilities", "points"}) {
            field = key;
            if (!j.contains(key)) continue;
            for (const auto& row : j.at(key)) {
                std::vector<double> c = row.get<std::vector<double>>();
                Point p = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<long>(c.size()));
                (std::string(key) == "facilities" ? r.facilities : r.points).push_back(p);
            }
        }
        field = "assignment";
        if (j.contains("assignment")) r.assignment = j.at("assignment").get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ParseError(field, line_of_key(text, field), e.what());
    }
    for (int a : r.assignment)
        if (a < 0 || a >= static_cast<int>(r.facilities.size()))
            throw ParseError("assignment", line_of_key(text, "assignment"), "facility index out of range");
    if (!r.assignment.empty() && r.assignment.size() != r.points.size())
        throw ParseError("assignment", line_of_key(text, "assignment"), "one entry per point expected");
    return r;
}

std::string report_text(const SolveReport& r) {
    std::ostringstream os;
    os << "variant    " << (r.variant == Variant::SingleAllocation ? "sa" : "ni") << "\n";
    os << "status     " << r.status << "\n";
    os << "objective  " << fmt(r.objective, 6) << "\n";
    os << "bound      " << fmt(r.bound, 6) << "\n";
    os << "gap        " << std::scientific << std::setprecision(3) << r.gap << std::defaultfloat << "\n";
    os << "nodes      " << r.nodes << "\n";
    os << "time       " << fmt(r.seconds, 2) << " s\n";
    for (std::size_t j = 0; j < r.facilities.size(); ++j) {
        os << "x" << j + 1 << "         (";
        for (int k = 0; k < r.facilities[j].size(); ++k) os << (k ? ", " : "") << fmt(r.facilities[j][k], 6);
        os << ")\n";
    }
    if (!r.assignment.empty()) {
        os << "assignment";
        for (int a : r.assignment) os << " " << a + 1;
        os << "\n";
    }
    return os.str();
}

std::string render_svg(const std::vector<Point>& points, const std::vector<Point>& facilities,
                       const std::vector<int>& assignment) {
    const double lo = -0.5, hi = 10.5, scale = 40.0;
    const double side = (hi - lo) * scale;
    auto X = [&](const Point& p) { return fmt((p[0] - lo) * scale, 2); };
    auto Y = [&](const Point& p) { return fmt((hi - (p.size() > 1 ? p[1] : 0.0)) * scale, 2); };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(side, 0) << "\" height=\""
       << fmt(side, 0) << "\" viewBox=\"0 0 " << fmt(side, 0) << " " << fmt(side, 0) << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << fmt(side, 0) << "\" height=\"" << fmt(side, 0)
       << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < assignment.size() && i < points.size(); ++i) {
        const int a = assignment[i];
        if (a < 0 || a >= static_cast<int>(facilities.size())) continue;
        if ((points[i] - facilities[a]).norm() < 1e-9) continue;
        os << "<line class=\"edge\" x1=\"" << X(points[i]) << "\" y1=\"" << Y(points[i]) << "\" x2=\""
           << X(facilities[a]) << "\" y2=\"" << Y(facilities[a]) << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
    }
    for (const auto& p : points)
        os << "<circle class=\"point\" cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"3\" fill=\"black\"/>\n";
    for (const auto& f : facilities) {
        const double cx = (f[0] - lo) * scale, cy = (hi - (f.size() > 1 ? f[1] : 0.0)) * scale;
        os << "<polygon class=\"facility\" points=\"" << fmt(cx, 2) << "," << fmt(cy - 7, 2) << " " << fmt(cx - 6, 2)
           << "," << fmt(cy + 4, 2) << " " << fmt(cx + 6, 2) << "," << fmt(cy + 4, 2) << "\" fill=\"black\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

RelaxationMode parse_relaxation_mode(const std::string& text) {
    if (text == "dense") return RelaxationMode::Dense;
    if (text == "sparse") return RelaxationMode::Sparse;
    if (text == "sym") return RelaxationMode::Sym;
    throw ParseError("mode", 0, "expected dense, sparse or sym");
}

std::string EmitSummary::line() const {
    std::ostringstream os;
    os << "blocks " << block_sides.size() << " (moment " << moment_blocks << ") sides";
    for (int s : block_sides) os << " " << s;
    os << " variables " << variables << " r0 " << r0;
    return os.str();
}

EmitSummary emit_sdp(const Instance& inst, int r, RelaxationMode mode, std::ostream& out, const HierarchyOptions& opt) {
    if (inst.variant != Variant::SingleAllocation)
        throw std::invalid_argument("the moment hierarchy is built for sa problems");
    const int r0 = relaxation_r0(sa_polynomial_program(inst));
    if (r < r0)
        throw std::invalid_argument("order r=" + std::to_string(r) + " is below r0=" + std::to_string(r0));
    MomentRelaxation rel = mode == RelaxationMode::Dense    ? build_dense(inst, r, opt)
                           : mode == RelaxationMode::Sparse ? build_sparse(inst, r, opt)
                                                            : build_sym_relaxation(inst, r, opt);
    write_sdpa(rel, out);
    EmitSummary s;
    for (const auto& b : rel.blocks) s.block_sides.push_back(b.side());
    int eq = 0;
    for (const auto& e : rel.equalities)
        if (e.family != "normalization") ++eq;
    if (eq > 0) s.block_sides.push_back(-2 * eq);
    s.moment_blocks = rel.num_moment_blocks();
    s.variables = rel.table.size() - 1;
    s.r0 = r0;
    return s;
}

std::string CountBasisReport::text() const {
    std::ostringstream os;
    os << "instance            n=" << n << " p=" << p << " d=" << d << " k=" << k << " variables=" << variables << "\n";
    os << "standard all        " << standard << "\n";
    os << "standard facility   " << standard_symmetric << "\n";
    os << "sparse sides       ";
    for (long long s : sparse_sides) os << " " << s;
    os << "\n";
    if (enumerated) {
        os << "products all shapes " << product_total << "\n";
        os << "products trivial    " << product_trivial;
        if (n == 3 && p == 2 && d == 2 && k == 2) os << " (reference claim " << reference_claim << ")";
        os << "\n";
        os << "invariant dimension " << invariant_dimension << "\n";
    } else os << "enumeration skipped (budget exceeded)\n";
    if (p == 2 && d == 2 && k == 2) {
        os << "formula sym         " << formula_sym << "\n";
        os << "formula std         " << formula_std << "\n";
        os << "formula difference  " << formula_difference << "\n";
        os << "formulas consistent " << (formulas_consistent ? "yes" : "no") << "\n";
    }
    if (!note.empty()) os << "note                " << note << "\n";
    return os.str();
}

CountBasisReport count_basis(int n, int p, int d, int k, long long budget) {
    if (n < 1 || p < 1 || d < 1 || k < 0) throw std::invalid_argument("count-basis needs n, p, d >= 1 and k >= 0");
    CountBasisReport r;
    r.n = n;
    r.p = p;
    r.d = d;
    r.k = k;
    const SaLayout L(n, p, d);
    r.variables = L.count();
    r.standard = binomial(L.count() + k, k);
    for (const auto& I : sparse_index_sets(L)) r.sparse_sides.push_back(binomial(static_cast<int>(I.size()) + k, k));
    if (r.standard <= budget) {
        const SymBasisFull full = sym_adapted_basis_full(n, p, d, k, false);
        r.enumerated = true;
        r.standard_symmetric = full.report.standard_symmetric;
        r.product_total = full.report.product_total;
        r.product_trivial = full.report.product_trivial;
        r.invariant_dimension = full.report.orbit_count;
        r.reference_claim = full.report.reference_claim;
    } else {
        r.standard_symmetric = binomial(L.count() - n * n - 2 * n + k, k);
    }
    if (p == 2 && d == 2 && k == 2) {
        const CountFormulas cf = count_formulas(n, false);
        r.formula_sym = cf.sym_value;
        r.formula_std = cf.std_value;
        r.formula_difference = cf.difference;
        r.formulas_consistent = cf.consistent_at_n && cf.consistent_as_polynomials;
        r.note = cf.note;
        if (r.enumerated) {
            r.note += "; enumerated trivial products " + std::to_string(r.product_trivial) +
                      (2 * r.product_trivial == cf.sym_numerator ? " match" : " differ from") + " the sym formula";
        }
    }
    return r;
}

std::string BenchCell::label() const {
    std::string name = kind;
    if (kind.rfind("kcentrum:", 0) == 0) name = kind.substr(9) + "-centrum";
    return std::to_string(p) + "-" + name + " tau=" + tau;
}

std::vector<BenchCell> table3_cells() {
    struct Row {
        int p;
        double v[3][3];  // kind x tau
    };
    static const Row rows[] = {
        {2, {{150.955, 135.5222, 130.856}, {4.9452, 4.8209, 4.788}, {100.8474, 95.0892, 89.0238}}},
        {5, {{78.6074, 72.2369, 68.1791}, {2.8831, 2.661, 2.5094}, {53.4995, 49.6932, 46.9844}}},
        {10, {{45.0525, 41.6851, 39.7222}, {1.6929, 1.6113, 1.595}, {30.7137, 28.9017, 27.5376}}},
        {15, {{30.0543, 27.6282, 26.6047}, {1.1139, 1.0717, 1.053}, {22.4165, 20.6536, 20.8544}}},
        {30, {{9.9488, 8.7963, 8.6995}, {1.008, 0.9192, 0.8508}, {9.0806, 8.521662, 8.001695}}},
    };
    static const char* kinds[3] = {"median", "center", "kcentrum:25"};
    static const char* taus[3] = {"3/2", "2", "3"};
    std::vector<BenchCell> out;
    for (const Row& row : rows)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                BenchCell c;
                c.kind = kinds[a];
                c.p = row.p;
                c.tau = taus[b];
                c.reference_value = row.v[a][b];
                if (row.p == 2 && b == 1 && a == 0) c.reference_facilities = {Point{{7.28, 4.71}}, Point{{2.67, 5.10}}};
                if (row.p == 2 && b == 1 && a == 1) c.reference_facilities = {Point{{8.77, 4.58}}, Point{{3.39, 5.09}}};
                out.push_back(c);
            }
    return out;
}

namespace {

BenchRow run_table1_cell(const BenchCell& cell, const BenchOptions& o, std::mt19937& rng) {
    std::vector<Point> pts(benchmark_points().begin(), benchmark_points().begin() + o.subset);
    const int n = o.subset;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    NIWeights w;
    w.omega = Eigen::VectorXd::Ones(n);
    w.lambda.resize(n, cell.p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cell.p; ++j) w.lambda(i, j) = U(rng);
    w.mu = Eigen::MatrixXd::Zero(cell.p, cell.p);
    for (int a = 0; a < cell.p; ++a)
        for (int b = a + 1; b < cell.p; ++b) w.mu(a, b) = U(rng);
    const Instance inst = make_ni_instance(pts, parse_tau(cell.tau), cell.p, w);
    BenchRow row;
    row.cell = cell;
    const auto t0 = std::chrono::steady_clock::now();
    SolverSettings conic;
    conic.tol = o.settings.tol;
    const NiProgram ni = build_ni(inst);
    const Solution sol = solve(ni.prog, conic);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (int j = 0; j < inst.p; ++j) {
        Point x(inst.d());
        for (int k = 0; k < inst.d(); ++k) x[k] = sol.x.size() ? sol.x[ni.x[j][k]] : 0.0;
        row.facilities.push_back(x);
    }
    row.objective = eval_ni(row.facilities, inst).objective;
    row.bound = sol.dual_objective;
    row.closed = sol.status == SolveStatus::Optimal;
    row.gap = std::max(0.0, row.objective - row.bound) / std::max(1.0, std::abs(row.objective));
    return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& o) {
    if (o.subset < 1 || o.subset > static_cast<int>(benchmark_points().size()))
        throw std::invalid_argument("subset size must be in 1..50");
    std::vector<BenchRow> rows;
    if (o.preset == "table1") {
        std::mt19937 rng(o.settings.seed);
        const std::vector<int> ps = o.p_list.empty() ? std::vector<int>{2, 3} : o.p_list;
        const std::vector<std::string> taus = o.tau_list.empty() ? std::vector<std::string>{"2"} : o.tau_list;
        for (int p : ps)
            for (const auto& tau : taus) {
                BenchCell cell;
                cell.kind = "ni-random";
                cell.p = p;
                cell.tau = tau;
                rows.push_back(run_table1_cell(cell, o, rng));
                if (o.log) *o.log << rows.back().cell.label() << " done in " << fmt(rows.back().seconds, 2) << " s\n";
            }
        return rows;
    }
    if (o.preset != "table3") throw std::invalid_argument("unknown preset '" + o.preset + "' (table3, table1)");
    const std::vector<int> ps = o.p_list.empty() ? std::vector<int>{2} : o.p_list;
    const std::vector<std::string> taus = o.tau_list.empty() ? std::vector<std::string>{"3/2", "2", "3"} : o.tau_list;
    const std::vector<std::string> kinds =
        o.kinds.empty() ? std::vector<std::string>{"median", "center", "kcentrum:25"} : o.kinds;
    std::vector<Point> pts(benchmark_points().begin(), benchmark_points().begin() + o.subset);
    for (const std::string& kind : kinds)
        for (int p : ps)
            for (const std::string& tau : taus) {
                BenchCell cell;
                cell.kind = kind;
                cell.p = p;
                cell.tau = tau;
                const NormExponent norm = parse_tau(tau);
                for (const auto& ref : table3_cells())
                    if (ref.kind == kind && ref.p == p && parse_tau(ref.tau) == norm && o.subset == 50) {
                        cell.reference_value = ref.reference_value;
                        cell.reference_facilities = ref.reference_facilities;
                    }
                const Instance inst = make_sa_instance(pts, norm, p, parse_lambda_preset(kind, o.subset).lambda);
                BnbSettings st;
                st.gap_tol = o.settings.gap;
                st.time_limit = o.settings.time_limit;
                st.threads = o.deterministic ? 1 : o.settings.workers;
                st.seed = o.settings.seed;
                st.ala_starts = o.settings.ala_starts;
                st.conic.tol = o.settings.tol;
                st.log = o.log;
                st.log_interval = 30.0;
                const BnbResult res = solve_misocp(inst, st);
                BenchRow row;
                row.cell = cell;
                row.objective = res.incumbent.objective;
                row.bound = res.best_bound;
                row.gap = res.gap;
                row.time_limit = res.stats.time_limit_hit;
                row.closed = res.gap <= std::max(o.settings.gap, 1e-12) + 1e-12;
                row.seconds = res.stats.seconds;
                row.facilities = res.incumbent.x;
                if (cell.reference_value > 0) {
                    row.rel_diff = (row.objective - cell.reference_value) / cell.reference_value;
                    row.within = std::abs(row.rel_diff) <= o.rel_tol;
                }
                if (o.log) *o.log << cell.label() << " objective " << fmt(row.objective, 6) << " in " << fmt(row.seconds, 2) << " s\n";
                rows.push_back(row);
            }
    return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows, bool include_time) {
    std::ostringstream os;
    os << std::left << std::setw(26) << "cell" << std::right << std::setw(14) << "objective" << std::setw(14) << "reference"
       << std::setw(11) << "rel.diff" << std::setw(11) << "gap" << "  " << std::left << std::setw(10) << "status";
    if (include_time) os << std::right << std::setw(10) << "time[s]";
    os << "  facilities\n";
    for (const auto& r : rows) {
        std::string status = r.closed ? "closed" : (r.time_limit ? "time-limit" : "open");
        if (r.cell.reference_value > 0 && r.closed) status += r.within ? " ok" : " MISS";
        os << std::left << std::setw(26) << r.cell.label() << std::right << std::setw(14) << fmt(r.objective, 4)
           << std::setw(14) << (r.cell.reference_value > 0 ? fmt(r.cell.reference_value, 4) : std::string("-")) << std::setw(11)
           << (r.cell.reference_value > 0 ? fmt(100.0 * r.rel_diff, 2) + "%" : std::string("-")) << std::setw(11)
           << fmt(r.gap, 6) << "  " << std::left << std::setw(10) << status;
        if (include_time) os << std::right << std::setw(10) << fmt(r.seconds, 2);
        os << " ";
        for (const auto& f : r.facilities) {
            os << " (";
            for (int k = 0; k < f.size(); ++k) os << (k ? "," : "") << fmt(f[k], 3);
            os << ")";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace omloc
