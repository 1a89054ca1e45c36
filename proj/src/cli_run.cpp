#include <ostream>

#include <CLI11.hpp>
#include <omp.h>

#include "antigone/cli.hpp"

namespace antigone::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudo sensitive-attribute labelling and fairness-constrained tuning"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 0;
    bool force = false;
    bool serial = false;

    auto with_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides config 'output')");
        sub->add_option("--seed", seed, "Seed (overrides config 'seed')");
        sub->add_option("--jobs", jobs, "Thread cap for parallel kernels")->check(CLI::PositiveNumber);
        sub->add_flag("--force", force, "Overwrite outputs written under another config");
        sub->add_flag("--serial", serial, "Use the serial reference path");
        return sub;
    };
    auto* prepare = with_common(app.add_subcommand("prepare", "Load or generate the dataset, split, standardize"));
    auto* train_grid = with_common(app.add_subcommand("train-grid", "Train the labeller grid, keeping every epoch"));
    auto* label = with_common(app.add_subcommand("label", "Select labellers by EDM and pseudo-label validation"));
    auto* sweep = with_common(app.add_subcommand("mc-sweep", "Mutually-contaminated noise sweep"));
    auto* tune = with_common(app.add_subcommand("tune", "Accuracy-binned JTT tuning"));

    auto* report = app.add_subcommand("report", "Render tuner result files");
    std::vector<std::string> result_files;
    std::string format = "table";
    report->add_option("files", result_files, "Tuner result files")->required();
    report->add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        if (report->parsed()) {
            std::vector<std::filesystem::path> files(result_files.begin(), result_files.end());
            out << cmd_report(files, format == "json" ? ReportFormat::json : ReportFormat::table);
            return exit_ok;
        }
        Overrides overrides;
        if (!out_dir.empty()) overrides.output = out_dir;
        for (auto* sub : app.get_subcommands()) {
            if (sub->count("--seed") > 0) overrides.seed = seed;
        }
        const auto config = load_config(config_path, overrides);
        if (jobs > 0) omp_set_num_threads(jobs);
        CommandOptions options;
        options.force = force;
        options.execution = serial ? Execution::serial : Execution::parallel;

        std::vector<std::filesystem::path> written;
        if (prepare->parsed()) written = cmd_prepare(config, options);
        if (train_grid->parsed()) written = cmd_train_grid(config, options);
        if (label->parsed()) written = cmd_label(config, options);
        if (sweep->parsed()) written = cmd_mc_sweep(config, options);
        if (tune->parsed()) written = cmd_tune(config, options);
        for (const auto& p : written) err << "wrote " << p.string() << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace antigone::cli
