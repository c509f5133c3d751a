#include "crossview/config.hpp"
#include "crossview/errors.hpp"
#include "crossview/fileio.hpp"
#include "crossview/geojson.hpp"
#include "crossview/pipeline.hpp"
#include "crossview/report.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

namespace cfg = crossview::cfg;
namespace pipeline = crossview::pipeline;

struct CliOptions {
    std::string config_path;
    std::string stage_dir;
    std::string model;
    std::string format = "json";
};

CLI::App* add_command(CLI::App& app, const char* name, const char* description,
                      CliOptions& opts) {
    CLI::App* cmd = app.add_subcommand(name, description);
    cmd->add_option("--config", opts.config_path, "run configuration JSON file")
        ->required();
    cmd->add_option("--stage-dir", opts.stage_dir,
                    "checkpoint directory (overrides the config)");
    return cmd;
}

cfg::RunConfig load_with_overrides(const CliOptions& opts) {
    cfg::RunConfig config = cfg::load_config(opts.config_path);
    if (!opts.stage_dir.empty()) config.output.stage_dir = opts.stage_dir;
    if (!opts.model.empty()) {
        config.models = cfg::model_selection_from_name(opts.model);
    }
    config.validate();
    return config;
}

void run_one_stage(pipeline::Stage stage, const cfg::RunConfig& config) {
    const pipeline::Checkpoint checkpoint =
        pipeline::execute_stage(stage, config);
    std::cout << "stage " << pipeline::stage_name(stage)
              << " complete (hash " << checkpoint.hash << ")\n";
}

void write_reports(const pipeline::StudyState& state,
                   const cfg::RunConfig& config, bool json_format,
                   bool text_format) {
    if (json_format) {
        crossview::io::write_file(config.output.report_json,
                                  crossview::report::report_json(state));
        std::cout << "wrote " << config.output.report_json << "\n";
    }
    if (text_format) {
        crossview::io::write_file(config.output.report_text,
                                  crossview::report::report_text(state));
        std::cout << "wrote " << config.output.report_text << "\n";
    }
    crossview::io::write_file(config.output.modeling_csv,
                              crossview::report::modeling_csv(state.table));
    std::cout << "wrote " << config.output.modeling_csv << "\n";
}

void write_geojson(const pipeline::StudyState& state,
                   const cfg::RunConfig& config) {
    crossview::io::write_file(config.output.geojson,
                              crossview::geojson::emit(state));
    std::cout << "wrote " << config.output.geojson << "\n";
}

// Most advanced checkpoint that carries visibility data.
pipeline::Checkpoint load_visible_or_later(const cfg::RunConfig& config) {
    const pipeline::Stage candidates[] = {pipeline::Stage::fitted,
                                          pipeline::Stage::assigned,
                                          pipeline::Stage::visible};
    for (const pipeline::Stage stage : candidates) {
        if (pipeline::checkpoint_exists(stage, config.output.stage_dir)) {
            return pipeline::load_checkpoint(stage, config.output.stage_dir);
        }
    }
    throw crossview::ValidationError(
        "no checkpoint with visibility data in " + config.output.stage_dir +
        "; run the visibility stage first");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Building-occluded visibility at road intersections with "
                 "Poisson regression against accident counts"};
    app.require_subcommand(1);

    CliOptions opts;
    add_command(app, "ingest",
                "parse OSM, accident, and traffic inputs into a checkpoint",
                opts);
    add_command(app, "network", "detect and merge road intersections", opts);
    add_command(app, "visibility", "compute view percentages per intersection",
                opts);
    add_command(app, "assign",
                "join accidents and traffic to intersections, build the "
                "modeling table",
                opts);
    CLI::App* fit = add_command(app, "fit", "fit the Poisson models", opts);
    fit->add_option("--model", opts.model, "models to fit: 1, 2, or both")
        ->check(CLI::IsMember({"1", "2", "both"}));
    CLI::App* report =
        add_command(app, "report", "write the regression report", opts);
    report->add_option("--format", opts.format, "report format")
        ->check(CLI::IsMember({"json", "text"}));
    add_command(app, "export-geojson",
                "write intersections and view fans as GeoJSON", opts);
    CLI::App* run_all = add_command(
        app, "run-all", "run every stage and write all outputs", opts);
    run_all->add_option("--model", opts.model, "models to fit: 1, 2, or both")
        ->check(CLI::IsMember({"1", "2", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const cfg::RunConfig config = load_with_overrides(opts);
        if (app.got_subcommand("ingest")) {
            run_one_stage(pipeline::Stage::ingested, config);
        } else if (app.got_subcommand("network")) {
            run_one_stage(pipeline::Stage::networked, config);
        } else if (app.got_subcommand("visibility")) {
            run_one_stage(pipeline::Stage::visible, config);
        } else if (app.got_subcommand("assign")) {
            run_one_stage(pipeline::Stage::assigned, config);
        } else if (app.got_subcommand("fit")) {
            run_one_stage(pipeline::Stage::fitted, config);
        } else if (app.got_subcommand("report")) {
            const pipeline::Checkpoint checkpoint = pipeline::load_checkpoint(
                pipeline::Stage::fitted, config.output.stage_dir);
            write_reports(checkpoint.state, config, opts.format == "json",
                          opts.format == "text");
        } else if (app.got_subcommand("export-geojson")) {
            write_geojson(load_visible_or_later(config).state, config);
        } else if (app.got_subcommand("run-all")) {
            const pipeline::Checkpoint checkpoint = pipeline::run_all(config);
            std::cout << "stage fitted complete (hash " << checkpoint.hash
                      << ")\n";
            write_reports(checkpoint.state, config, true, true);
            write_geojson(checkpoint.state, config);
        }
    } catch (const crossview::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crossview::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
