// qsd: optimal fixed-rate quantum detection from the command line.
#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qsd/detection.hpp"
#include "qsd/io.hpp"
#include "qsd/linalg.hpp"
#include "qsd/oracle.hpp"
#include "qsd/sim.hpp"
#include "qsd/symmetry.hpp"

namespace {

using namespace qsd;

// 0 success, 1 usage/IO/parse, 2 validation/not-optimal, 3 solver failure.
int map_error(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ParseError:
            return 1;
        case ErrorCode::NoStrictlyFeasibleStart:
        case ErrorCode::MaxIterations:
        case ErrorCode::NumericalFailure:
            return 3;
        default:
            return 2;
    }
}

int report_error(const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return map_error(e);
}

double parse_double(const std::string& s) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "not a number: \"" + s + "\"");
    }
    if (pos != s.size()) throw Error(ErrorCode::ParseError, "not a number: \"" + s + "\"");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t end = text.find(sep, start);
        out.push_back(text.substr(start, end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

// "a:b:step" inclusive range or comma list; values must lie in [0, 1).
std::vector<double> parse_beta_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        const std::vector<std::string> parts = split(text, ':');
        if (parts.size() != 3)
            throw Error(ErrorCode::ParseError, "range grid must be a:b:step, got \"" + text + "\"");
        const double a = parse_double(parts[0]);
        const double b = parse_double(parts[1]);
        const double step = parse_double(parts[2]);
        if (step <= 0.0) throw Error(ErrorCode::ParseError, "grid step must be positive");
        for (double v = a; v <= b + 1e-12; v += step) grid.push_back(std::min(v, b));
    } else {
        for (const std::string& tok : split(text, ',')) {
            if (tok.empty()) throw Error(ErrorCode::ParseError, "empty entry in beta grid");
            grid.push_back(parse_double(tok));
        }
    }
    if (grid.empty()) throw Error(ErrorCode::ParseError, "empty beta grid");
    for (double v : grid)
        if (!(v >= 0.0) || !(v < 1.0))
            throw Error(ErrorCode::ParseError, "grid point " + std::to_string(v) + " outside [0, 1)");
    std::sort(grid.begin(), grid.end());
    return grid;
}

enum class Method { Auto, Full, Sim, Reduced };

Method parse_method(const std::string& s) {
    if (s == "auto") return Method::Auto;
    if (s == "full") return Method::Full;
    if (s == "sim") return Method::Sim;
    if (s == "reduced") return Method::Reduced;
    throw Error(ErrorCode::ParseError, "unknown method \"" + s + "\"");
}

struct Outcome {
    SolutionDocument sol;
    std::optional<ResidualReport> report;
};

Outcome compute_solution(const EnsembleDocument& doc, const StateEnsemble& ens, double beta,
                         Method method, const sdp::SolveOptions& opts) {
    Outcome out;
    out.sol.beta = beta;
    Method effective = method;
    if (method == Method::Auto) effective = (doc.gu || doc.cgu) ? Method::Reduced : Method::Full;
    if (effective == Method::Reduced && !doc.gu && !doc.cgu)
        throw Error(ErrorCode::ParseError, "--method reduced needs a document with a gu or cgu block");

    if (effective == Method::Sim) {
        out.sol.method = "sim";
        out.sol.measurement = sim_measurement(ens, beta);
        out.sol.triple = evaluate(ens, out.sol.measurement);
        out.sol.iterations = 0;
        OptimalityCertificate cert = sim_certificate(ens, beta);
        out.sol.certificate = cert;
        out.report = check_optimality(ens, out.sol.measurement, cert, beta);
        return out;
    }

    if (effective == Method::Full) {
        PrimalSolution ps = solve_primal(ens, beta, opts);
        if (ps.status != sdp::SolveStatus::Optimal)
            throw Error(ErrorCode::NumericalFailure,
                        std::string("primal solve: ") + sdp::to_string(ps.status));
        out.sol.method = "sdp";
        out.sol.measurement = symmetrized(ps.measurement);
        out.sol.iterations = ps.iterations;
    } else {
        ReducedSolution rs = doc.gu ? solve_gu_reduced(*doc.gu, beta, opts)
                                    : solve_cgu_reduced(*doc.cgu, beta, opts);
        if (rs.status != sdp::SolveStatus::Optimal)
            throw Error(ErrorCode::NumericalFailure,
                        std::string("reduced solve: ") + sdp::to_string(rs.status));
        out.sol.method = doc.gu ? "gu-reduced" : "cgu-reduced";
        out.sol.measurement = rs.measurement;
        out.sol.iterations = rs.iterations;
    }
    out.sol.triple = evaluate(ens, out.sol.measurement);

    DualSolution ds = solve_dual(ens, beta, opts);
    if (ds.status != sdp::SolveStatus::Optimal)
        throw Error(ErrorCode::NumericalFailure,
                    std::string("dual solve: ") + sdp::to_string(ds.status));
    out.sol.certificate = ds.certificate;
    out.report = check_optimality(ens, out.sol.measurement, ds.certificate, beta);
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

int run_validate(const std::string& path) {
    try {
        EnsembleDocument doc = parse_ensemble_document(read_text_file(path));
        StateEnsemble ens = realize_ensemble(doc);
        Json j{{"valid", true},
               {"n", ens.n},
               {"m", ens.m},
               {"beta_min", ens.spectral.beta_min},
               {"lambda_min", ens.spectral.lambda_min}};
        std::cout << j.dump(2) << "\n";
        return 0;
    } catch (const Error& e) {
        return report_error(e);
    }
}

int run_solve(const std::string& path, bool has_beta, double beta_flag, const std::string& method_str,
              double tol_gap, int max_iters, const std::string& out_path, bool verbose) {
    try {
        EnsembleDocument doc = parse_ensemble_document(read_text_file(path));
        StateEnsemble ens = realize_ensemble(doc);
        const double beta = has_beta ? beta_flag : ens.spectral.beta_min;
        if (!(beta >= 0.0) || !(beta < 1.0)) {
            std::cerr << "error: --beta must lie in [0, 1), got " << beta << "\n";
            return 1;
        }
        sdp::SolveOptions opts;
        opts.tol_gap = tol_gap;
        opts.max_inner = max_iters;
        opts.verbose = verbose;
        if (verbose) opts.log = &std::cerr;
        Outcome out = compute_solution(doc, ens, beta, parse_method(method_str), opts);
        emit(solution_to_json(out.sol, out.report).dump(2) + "\n", out_path);
        return 0;
    } catch (const Error& e) {
        return report_error(e);
    }
}

int run_sweep(const std::string& path, const std::string& grid_str, const std::string& method_str,
              double tol_gap, int max_iters, const std::string& out_path) {
    try {
        EnsembleDocument doc = parse_ensemble_document(read_text_file(path));
        StateEnsemble ens = realize_ensemble(doc);
        const std::vector<double> grid = parse_beta_grid(grid_str);
        const Method method = parse_method(method_str);
        sdp::SolveOptions opts;
        opts.tol_gap = tol_gap;
        opts.max_inner = max_iters;

        std::vector<std::future<SweepRow>> futures;
        futures.reserve(grid.size());
        for (double beta : grid)
            futures.push_back(std::async(std::launch::async, [&, beta]() {
                SweepRow row;
                row.beta = beta;
                try {
                    Outcome out = compute_solution(doc, ens, beta, method, opts);
                    row.p_d = out.sol.triple.p_d;
                    row.p_e = out.sol.triple.p_e;
                    row.p_i = out.sol.triple.p_i;
                    row.gap = out.report ? out.report->gap
                                         : std::numeric_limits<double>::quiet_NaN();
                    row.iters = out.sol.iterations;
                    row.method = out.sol.method;
                } catch (const Error&) {
                    row.p_d = row.p_e = row.p_i = row.gap = std::numeric_limits<double>::quiet_NaN();
                    row.iters = 0;
                    row.method = "failed";
                }
                return row;
            }));
        std::vector<SweepRow> rows;
        rows.reserve(futures.size());
        for (auto& f : futures) rows.push_back(f.get());
        emit(sweep_to_csv(rows), out_path);
        return 0;
    } catch (const Error& e) {
        return report_error(e);
    }
}

int run_certify(const std::string& solution_path, const std::string& ensemble_path) {
    try {
        EnsembleDocument doc = parse_ensemble_document(read_text_file(ensemble_path));
        StateEnsemble ens = realize_ensemble(doc);
        SolutionDocument sol = parse_solution_document(read_text_file(solution_path));
        if (!sol.certificate)
            throw Error(ErrorCode::ParseError, "solution document carries no certificate");
        ResidualReport report;
        try {
            report = check_optimality(ens, sol.measurement, *sol.certificate, sol.beta);
        } catch (const Error& e) {
            // Shape mismatch between the two files is a document problem.
            if (e.code() == ErrorCode::DimensionMismatch) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
            throw;
        }
        std::cout << report_to_json(report).dump(2) << "\n";
        return report.optimal ? 0 : 2;
    } catch (const Error& e) {
        return report_error(e);
    }
}

int run_sim(const std::string& path, bool has_beta, double beta_flag, const std::string& out_path) {
    try {
        EnsembleDocument doc = parse_ensemble_document(read_text_file(path));
        StateEnsemble ens = realize_ensemble(doc);
        const double beta = has_beta ? beta_flag : ens.spectral.beta_min;
        if (!(beta >= 0.0) || !(beta < 1.0)) {
            std::cerr << "error: --beta must lie in [0, 1), got " << beta << "\n";
            return 1;
        }
        SolutionDocument sol;
        sol.beta = beta;
        sol.method = "sim";
        sol.measurement = sim_measurement(ens, beta);
        sol.triple = evaluate(ens, sol.measurement);
        const SimParameters params = sim_parameters(ens, beta);
        const Theorem1Result cond = theorem1_check(ens);
        std::optional<ResidualReport> report;
        if (cond.holds) {
            sol.certificate = sim_certificate(ens, beta);
            report = check_optimality(ens, sol.measurement, *sol.certificate, beta);
        }
        Json j{{"beta", beta},
               {"gamma", params.gamma},
               {"beta_min", params.beta_min},
               {"condition",
                Json{{"holds", cond.holds}, {"deviation", cond.deviation}}},
               {"p_d", sol.triple.p_d},
               {"p_e", sol.triple.p_e},
               {"p_i", sol.triple.p_i}};
        if (cond.alpha) j["condition"]["alpha"] = *cond.alpha;
        std::cout << j.dump(2) << "\n";
        if (!out_path.empty()) emit(solution_to_json(sol, report).dump(2) + "\n", out_path);
        return 0;
    } catch (const Error& e) {
        return report_error(e);
    }
}

int run_oracle(const std::string& path, bool has_beta, double beta_flag, const std::string& mode,
               int resolution, int restarts, std::uint64_t seed, const std::string& out_path) {
    try {
        EnsembleDocument doc = parse_ensemble_document(read_text_file(path));
        StateEnsemble ens = realize_ensemble(doc);
        const double beta = has_beta ? beta_flag : ens.spectral.beta_min;
        if (!(beta >= 0.0) || !(beta < 1.0)) {
            std::cerr << "error: --beta must lie in [0, 1), got " << beta << "\n";
            return 1;
        }
        OracleResult res = mode == "grid" ? grid_search(ens, beta, resolution)
                                          : random_restart_ascent(ens, beta, restarts, seed);
        Json j{{"beta", beta},
               {"mode", mode},
               {"best_pd", res.best_pd},
               {"resolution", res.resolution},
               {"evaluations", res.evaluations}};
        std::cout << j.dump(2) << "\n";
        if (!out_path.empty()) emit(measurement_to_json(res.best).dump(2) + "\n", out_path);
        return 0;
    } catch (const Error& e) {
        return report_error(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal quantum detection at a fixed inconclusive rate"};
    app.require_subcommand(1);

    std::string path, out_path, solution_path, ensemble_path;
    std::string method = "auto", grid_str, mode = "grid";
    double beta_flag = 0.0, tol_gap = 1e-6;
    int max_iters = 50, resolution = 64, restarts = 50;
    std::uint64_t seed = 0;
    bool verbose = false;
    int rc = 0;

    CLI::App* validate = app.add_subcommand("validate", "Validate an ensemble document");
    validate->add_option("path", path, "ensemble JSON")->required();
    validate->callback([&]() { rc = run_validate(path); });

    CLI::App* solve = app.add_subcommand("solve", "Solve for the optimal measurement at one beta");
    solve->add_option("path", path, "ensemble JSON")->required();
    CLI::Option* solve_beta = solve->add_option("--beta", beta_flag, "inconclusive rate (default beta_min)");
    solve->add_option("--method", method, "auto|full|sim|reduced")
        ->check(CLI::IsMember({"auto", "full", "sim", "reduced"}));
    solve->add_option("--tol-gap", tol_gap, "duality gap tolerance");
    solve->add_option("--max-iters", max_iters, "Newton iterations per centering step");
    solve->add_option("--out", out_path, "write solution JSON here instead of stdout");
    solve->add_flag("--verbose", verbose, "log solver progress to stderr");
    solve->callback([&]() {
        rc = run_solve(path, solve_beta->count() > 0, beta_flag, method, tol_gap, max_iters, out_path,
                       verbose);
    });

    CLI::App* sweep = app.add_subcommand("sweep", "Solve across a beta grid, emit CSV");
    sweep->add_option("path", path, "ensemble JSON")->required();
    sweep->add_option("--beta-grid", grid_str, "a:b:step or comma list")->required();
    sweep->add_option("--method", method, "auto|full|sim|reduced")
        ->check(CLI::IsMember({"auto", "full", "sim", "reduced"}));
    sweep->add_option("--tol-gap", tol_gap, "duality gap tolerance");
    sweep->add_option("--max-iters", max_iters, "Newton iterations per centering step");
    sweep->add_option("--out", out_path, "write CSV here instead of stdout");
    sweep->callback([&]() { rc = run_sweep(path, grid_str, method, tol_gap, max_iters, out_path); });

    CLI::App* certify = app.add_subcommand("certify", "Check a solution file against an ensemble");
    certify->add_option("solution", solution_path, "solution JSON")->required();
    certify->add_option("ensemble", ensemble_path, "ensemble JSON")->required();
    certify->callback([&]() { rc = run_certify(solution_path, ensemble_path); });

    CLI::App* sim = app.add_subcommand("sim", "Closed-form scaled inverse measurement");
    sim->add_option("path", path, "ensemble JSON")->required();
    CLI::Option* sim_beta = sim->add_option("--beta", beta_flag, "inconclusive rate (default beta_min)");
    sim->add_option("--out", out_path, "write solution JSON here");
    sim->callback([&]() { rc = run_sim(path, sim_beta->count() > 0, beta_flag, out_path); });

    CLI::App* oracle = app.add_subcommand("oracle", "Brute-force reference optimizer");
    oracle->add_option("path", path, "ensemble JSON")->required();
    CLI::Option* oracle_beta = oracle->add_option("--beta", beta_flag, "inconclusive rate (default beta_min)");
    oracle->add_option("--mode", mode, "grid|ascent")->check(CLI::IsMember({"grid", "ascent"}));
    oracle->add_option("--resolution", resolution, "grid points per axis");
    oracle->add_option("--restarts", restarts, "ascent restarts");
    oracle->add_option("--seed", seed, "ascent RNG seed");
    oracle->add_option("--out", out_path, "write best measurement JSON here");
    oracle->callback([&]() {
        rc = run_oracle(path, oracle_beta->count() > 0, beta_flag, mode, resolution, restarts, seed,
                        out_path);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return rc;
}
