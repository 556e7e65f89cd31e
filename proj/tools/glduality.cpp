#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glduality/suites.hpp"

namespace {

namespace fs = std::filesystem;
using namespace glduality;

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

void print_report(const CheckReport& rep) {
    for (const auto& c : rep.checks) {
        std::cout << (c.pass ? "[ ok ] " : "[FAIL] ") << rep.suite << '/' << c.name
                  << " residual=" << format_double(c.residual)
                  << " tol=" << format_double(c.tolerance) << '\n';
    }
}

std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream is(csv);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw ConfigError("bad sweep value '" + tok + "'");
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"duality verification laboratory for the scalar Ginzburg-Landau energy"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string suite;
    std::string param;
    std::string values_csv;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option("--out", out_dir, "output directory");
    };
    CLI::App* cmd_solve = app.add_subcommand("solve", "solve the primal problem");
    add_common(cmd_solve);
    CLI::App* cmd_verify = app.add_subcommand("verify", "run verification suites");
    add_common(cmd_verify);
    cmd_verify->add_option("--suite", suite, "thm1|thm2|thm3-penalty|toland|exact-dual|biconj|all");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "sweep one parameter");
    add_common(cmd_sweep);
    cmd_sweep->add_option("--param", param, "K|K1|eps|eps1|gamma|alpha|beta|n")->required();
    cmd_sweep->add_option("--values", values_csv, "comma-separated values")->required();
    CLI::App* cmd_biconj = app.add_subcommand("biconj", "brute-force convex envelope");
    add_common(cmd_biconj);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        const fs::path out(out_dir);

        if (cmd_solve->parsed()) {
            Mesh m = make_mesh(cfg);
            GLParams p = make_params(cfg, m);
            auto [u0, rep] = newton_solve(p, Field(m), cfg.tol, cfg.max_iter);
            std::ostringstream os;
            write_field_csv(os, u0);
            write_text(out / "u0.csv", os.str());
            nlohmann::json j;
            j["converged"] = rep.converged;
            j["iterations"] = rep.iterations;
            j["final_residual"] = rep.final_residual;
            j["residual_history"] = rep.residual_history;
            j["J"] = eval_J(p, u0);
            j["config_echo"] = cfg.echo();
            write_text(out / "solve_report.json", j.dump(2) + "\n");
            std::cout << (rep.converged ? "converged" : "NOT converged") << " in "
                      << rep.iterations << " iterations, residual "
                      << format_double(rep.final_residual) << "\n";
            return rep.converged ? 0 : 3;
        }

        if (cmd_verify->parsed()) {
            std::vector<std::string> suites = suite.empty() ? cfg.suites
                                                            : std::vector<std::string>{suite};
            std::vector<CheckReport> all_reports;
            for (const auto& s : suites) {
                SuiteRun sr = run_suite(cfg, s);
                for (auto& [name, content] : sr.artifacts) write_text(out / name, content);
                for (auto& rep : sr.reports) {
                    print_report(rep);
                    write_text(out / ("report_" + rep.suite + ".json"), rep.to_string());
                    all_reports.push_back(std::move(rep));
                }
            }
            const int rc = exit_code(all_reports);
            std::cout << "RESULT: " << (rc == 0 ? "PASS" : "FAIL") << " (exit " << rc << ")\n";
            return rc;
        }

        if (cmd_sweep->parsed()) {
            const auto values = parse_value_list(values_csv);
            SweepTable table = sweep(cfg, param, values);
            const std::string csv = table.to_csv();
            write_text(out / ("sweep_" + param + ".csv"), csv);
            std::cout << csv;
            return 0;
        }

        if (cmd_biconj->parsed()) {
            SuiteRun sr = run_biconj(cfg);
            for (auto& [name, content] : sr.artifacts) write_text(out / name, content);
            for (auto& rep : sr.reports) {
                print_report(rep);
                write_text(out / ("report_" + rep.suite + ".json"), rep.to_string());
            }
            return exit_code(sr.reports);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
