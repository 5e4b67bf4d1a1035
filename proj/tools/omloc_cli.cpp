#include "omloc/cli_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace omloc;

namespace {

enum Exit { kOk = 0, kParse = 1, kSolver = 2, kTolerance = 3 };

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("", 0, "cannot write '" + path + "'");
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", 0, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_solve(const std::string& path, Variant expected, const std::string& svg, bool as_json, bool verbose,
              int workers, double time_limit) {
    ProblemFile pf = load_problem(path);
    if (pf.variant != expected)
        throw ParseError("variant", 0, std::string("expected a ") + (expected == Variant::NonInterchangeable ? "ni" : "sa") +
                                           " problem");
    if (workers > 0) pf.settings.workers = workers;
    if (time_limit > 0) pf.settings.time_limit = time_limit;
    const SolveReport rep = solve_problem(pf, verbose ? &std::cerr : nullptr);
    std::cout << (as_json ? report_json(rep) : report_text(rep));
    if (!svg.empty()) write_file(svg, render_svg(rep.points, rep.facilities, rep.assignment));
    return rep.status == "optimal" ? kOk : kSolver;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous multifacility ordered median location solvers"};
    app.require_subcommand(1);

    std::string problem, svg, out_path, mode = "dense", report_path;
    bool as_json = false, verbose = false;
    int workers = 0, order = 1;
    double time_limit = 0.0;

    auto* ni = app.add_subcommand("solve-ni", "Solve a non-interchangeable problem (SOCP)");
    auto* sa = app.add_subcommand("solve-sa", "Solve a single-allocation problem (MISOCP branch and bound)");
    for (auto* sub : {ni, sa}) {
        sub->add_option("problem", problem, "Problem file (JSON)")->required();
        sub->add_option("--svg", svg, "Write an SVG plot of the solution");
        sub->add_flag("--json", as_json, "Print the report as JSON");
        sub->add_flag("-v,--verbose", verbose, "Progress log on stderr");
        sub->add_option("--workers", workers, "Worker threads (1 is deterministic)");
        sub->add_option("--time-limit", time_limit, "Time limit in seconds");
    }

    auto* emit = app.add_subcommand("emit-sdp", "Write the moment relaxation in SDPA sparse format");
    emit->add_option("problem", problem, "Problem file (JSON, sa variant)")->required();
    emit->add_option("-r,--order", order, "Relaxation order")->required();
    emit->add_option("--mode", mode, "dense, sparse or sym")->check(CLI::IsMember({"dense", "sparse", "sym"}));
    emit->add_option("-o,--out", out_path, "Output .dat-s path")->required();
    emit->add_option("--workers", workers, "Builder threads");

    int cn = 0, cp = 0, cd = 0, ck = 0;
    long long budget = 2000000;
    auto* count = app.add_subcommand("count-basis", "Standard, sparse and symmetry-adapted basis sizes");
    count->add_option("n", cn)->required();
    count->add_option("p", cp)->required();
    count->add_option("d", cd)->required();
    count->add_option("k", ck)->required();
    count->add_option("--budget", budget, "Largest basis enumerated");

    BenchOptions bo;
    std::string p_list, tau_list, kind_list;
    bool verify = false, with_times = false;
    auto* bench = app.add_subcommand("bench", "Run cells of the benchmark tables on the embedded data set");
    bench->add_option("--preset", bo.preset, "table3 or table1")->check(CLI::IsMember({"table3", "table1"}));
    bench->add_option("--subset", bo.subset, "Use the first N points");
    bench->add_option("--p", p_list, "Comma separated p values");
    bench->add_option("--tau", tau_list, "Comma separated tau values (r/s or decimal)");
    bench->add_option("--kind", kind_list, "Comma separated median, center, kcentrum:k");
    bench->add_option("--time-limit", bo.settings.time_limit, "Per cell time limit in seconds");
    bench->add_option("--gap", bo.settings.gap, "Relative gap tolerance");
    bench->add_option("--workers", workers, "Worker threads (ignored in deterministic mode)");
    bench->add_option("--seed", bo.settings.seed, "Seed");
    bench->add_flag("--verify", verify, "Exit 3 when a closed cell misses its reference value");
    bench->add_flag("--times", with_times, "Include wall times in the table");
    bench->add_flag("-v,--verbose", verbose, "Progress log on stderr");

    auto* plot = app.add_subcommand("plot", "Render a JSON solve report as SVG");
    plot->add_option("report", report_path, "Report file (JSON)")->required();
    plot->add_option("-o,--out", out_path, "Output SVG path")->required();

    auto* dataset = app.add_subcommand("dataset", "Print the embedded 50-point data set as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    try {
        if (ni->parsed()) return run_solve(problem, Variant::NonInterchangeable, svg, as_json, verbose, workers, time_limit);
        if (sa->parsed()) return run_solve(problem, Variant::SingleAllocation, svg, as_json, verbose, workers, time_limit);
        if (emit->parsed()) {
            const ProblemFile pf = load_problem(problem);
            const Instance inst = to_instance(pf);
            HierarchyOptions opt;
            opt.workers = workers > 0 ? workers : 1;
            std::ostringstream os;
            const EmitSummary s = emit_sdp(inst, order, parse_relaxation_mode(mode), os, opt);
            if (s.r0 > 3) std::cerr << "warning: r0 = " << s.r0 << " makes every relaxation large\n";
            write_file(out_path, os.str());
            std::cout << s.line() << "\n";
            return kOk;
        }
        if (count->parsed()) {
            std::cout << count_basis(cn, cp, cd, ck, budget).text();
            return kOk;
        }
        if (bench->parsed()) {
            for (const auto& s : split(p_list)) bo.p_list.push_back(std::stoi(s));
            bo.tau_list = split(tau_list);
            bo.kinds = split(kind_list);
            bo.deterministic = workers <= 1;
            if (workers > 0) bo.settings.workers = workers;
            bo.log = verbose ? &std::cerr : nullptr;
            const auto rows = run_bench(bo);
            std::cout << bench_table(rows, with_times);
            if (verify)
                for (const auto& r : rows)
                    if (r.closed && !r.within) return kTolerance;
            return kOk;
        }
        if (plot->parsed()) {
            const SolveReport rep = parse_report(read_file(report_path));
            write_file(out_path, render_svg(rep.points, rep.facilities, rep.assignment));
            return kOk;
        }
        if (dataset->parsed()) {
            std::cout << print_points_csv(benchmark_points());
            std::cerr << "checksum " << std::hex << points_checksum(benchmark_points()) << "\n";
            return kOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    }
    return kOk;
}
