// hlab: check / solve / run built-in examples / self-test for Helmholtz-type
// inverse-problem conditions on second-order ODE systems.
//
// Exit codes: 0 all requested reports pass (or solve completed),
//             1 some report failed, 2 input error.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "hlab/runner.hpp"

namespace {

void emit(const hlab::RunReport& rr, const std::string& json_path) {
    std::string text = rr.doc.dump(2);
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Helmholtz-condition laboratory for second-order ODE systems"};
    app.require_subcommand(1);

    hlab::Overrides ov;
    std::uint64_t seed = 0;
    int samples = 0;
    double tol = 0.0;
    app.add_option("--seed", seed, "override the sampling seed");
    app.add_option("--samples", samples, "override the sample count");
    app.add_option("--tol", tol, "override the residual tolerance");

    std::string check_file, solve_file, example_name, json_path;
    double lambda = 1.0;

    auto* c_check = app.add_subcommand("check", "run the [check] ids of a problem file");
    c_check->add_option("file", check_file, "problem file")->required();
    c_check->add_option("--json", json_path, "also write the report to this path");

    auto* c_solve = app.add_subcommand("solve", "solve for theta per the [solve] section");
    c_solve->add_option("file", solve_file, "problem file")->required();
    c_solve->add_option("--json", json_path, "also write the report to this path");

    auto* c_example = app.add_subcommand("example", "run a built-in example");
    c_example->add_option("name", example_name,
                          "ex1 | projective | gyro-class | classic-gyro")
        ->required();
    c_example->add_option("--lambda", lambda, "projective-family parameter");
    c_example->add_option("--json", json_path, "also write the report to this path");

    auto* c_selftest = app.add_subcommand("selftest", "oracle and determinism suite");
    c_selftest->add_option("--json", json_path, "also write the report to this path");

    CLI11_PARSE(app, argc, argv);

    if (app.count("--seed")) ov.seed = seed;
    if (app.count("--samples")) ov.samples = samples;
    if (app.count("--tol")) ov.tol = tol;

    try {
        hlab::RunReport rr;
        if (c_check->parsed()) {
            rr = hlab::cmd_check(hlab::load_problem_file(check_file), ov);
        } else if (c_solve->parsed()) {
            rr = hlab::cmd_solve(hlab::load_problem_file(solve_file), ov);
        } else if (c_example->parsed()) {
            rr = hlab::cmd_example(example_name, lambda, ov);
        } else {
            rr = hlab::cmd_selftest(ov);
        }
        emit(rr, json_path);
        return rr.ok ? 0 : 1;
    } catch (const hlab::MissingSection& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const hlab::SyntaxError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const hlab::DimensionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const hlab::UnsupportedFunction& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
