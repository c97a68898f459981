#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nslab/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nslab: numerical laboratory for the heat-kernel Picard scheme"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "key=value config file")->required();

    std::string show_name;
    auto* pres = app.add_subcommand("presets", "list bundled preset configs");
    pres->add_option("--show", show_name, "print the named preset config text");

    auto* ver = app.add_subcommand("version", "print the version string");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    if (run->parsed()) return nslab::run_experiment(config_path);

    if (pres->parsed()) {
        auto all = nslab::presets();
        if (!show_name.empty()) {
            auto it = all.find(show_name);
            if (it == all.end()) {
                std::cerr << "unknown preset '" << show_name << "'\n";
                return 2;
            }
            std::cout << it->second;
            return 0;
        }
        for (const auto& [name, text] : all) std::cout << name << "\n";
        return 0;
    }

    if (ver->parsed()) {
        std::cout << "nslab 1.0.0\n";
        return 0;
    }
    return 0;
}
