#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mfl/manybody.hpp"
#include "mfl/runner.hpp"

using namespace mfl;

int main(int argc, char** argv) {
    CLI::App app{"mfl - mean-field boson dynamics laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string n_list;

    const std::vector<std::string> kinds = {"hartree", "nls", "pair", "manybody",
                                            "fock",    "rate", "sweep", "fit"};
    for (const auto& k : kinds) {
        auto* sub = app.add_subcommand(k);
        sub->add_option("--config", config_path, "config file (section.key = value lines)");
        sub->add_option("--set", sets, "override key=value")->take_all();
        if (k == "rate") sub->add_option("--N", n_list, "comma-separated N list");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();

    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) {
                std::cerr << "cannot open config: " << config_path << "\n";
                return 2;
            }
            std::stringstream ss;
            ss << is.rdbuf();
            text = ss.str();
        }
        std::vector<ConfigError> errors;
        auto parsed = parse_config(text + "\nrun.kind = " + kind + "\n", errors);
        if (!parsed) {
            for (auto& e : errors)
                std::cerr << "config error (line " << e.line << "): " << e.message << "\n";
            return 2;
        }
        ExperimentConfig cfg = *parsed;
        if (!n_list.empty()) {
            std::string err;
            if (!apply_override(cfg, "scaling.N=" + n_list, err)) {
                std::cerr << "--N: " << err << "\n";
                return 2;
            }
        }
        for (const auto& s : sets) {
            std::string err;
            if (!apply_override(cfg, s, err)) {
                std::cerr << "--set " << s << ": " << err << "\n";
                return 2;
            }
        }
        std::cout << run_experiment(cfg);
        return 0;
    } catch (const GuardError& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return 2;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
