// Command-line entry point: simulate, analyze, groundtruth, train, eval, serve.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "hism/app/config.hpp"
#include "hism/app/pipeline.hpp"
#include "hism/app/service.hpp"
#include "hism/error.hpp"

using namespace hism;

int main(int argc, char** argv) {
  CLI::App app{"Highlight-aware saliency workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, workdir, ui_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> sessions, port, epochs;
  std::optional<double> highlight_prob, duration;
  bool frames = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--workdir", workdir, "working directory (default: $HISM_WORKDIR)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--sessions", sessions, "number of sessions to simulate");
  app.add_option("--highlight-prob", highlight_prob, "probability that a critical situation is highlighted");
  app.add_option("--duration", duration, "session length in seconds");
  app.add_flag("--frames", frames, "write rendered frames into each session");
  app.add_option("--epochs", epochs, "maximum training epochs");
  app.add_option("--port", port, "service port");
  app.add_option("--ui-dir", ui_dir, "directory with the built monitor UI");

  auto* simulate = app.add_subcommand("simulate", "generate synthetic sessions");
  auto* analyze = app.add_subcommand("analyze", "fixation metrics and condition comparison");
  auto* groundtruth = app.add_subcommand("groundtruth", "element saliency ground truth per session");
  auto* train = app.add_subcommand("train", "train the highlight classifier and the saliency model");
  auto* evaluate = app.add_subcommand("eval", "score the model and baselines on test sessions");
  auto* serve = app.add_subcommand("serve", "host live sessions over HTTP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : app::exit_code::config;
  }

  try {
    app::RunConfig cfg = config_path.empty() ? app::RunConfig{} : app::load_run_config(config_path);
    if (!workdir.empty()) {
      cfg.workdir = workdir;
    } else if (cfg.workdir.empty()) {
      if (const char* env = std::getenv("HISM_WORKDIR")) cfg.workdir = env;
    }
    if (seed) cfg.seed = *seed;
    if (sessions) cfg.sessions = *sessions;
    if (highlight_prob) cfg.schedule.highlight_prob = *highlight_prob;
    if (duration) cfg.schedule.duration = *duration;
    if (frames) cfg.write_frames = true;
    if (epochs) cfg.train.max_epochs = *epochs;
    if (port) cfg.port = *port;
    if (!ui_dir.empty()) cfg.ui_dir = ui_dir;
    cfg.validate();

    if (*simulate) app::cmd_simulate(cfg, std::cout);
    else if (*analyze) app::cmd_analyze(cfg, std::cout);
    else if (*groundtruth) app::cmd_groundtruth(cfg, std::cout);
    else if (*train) app::cmd_train(cfg, std::cout);
    else if (*evaluate) app::cmd_eval(cfg, std::cout);
    else if (*serve) app::cmd_serve(cfg, std::cout);
    return app::exit_code::ok;
  } catch (const app::CommandError& e) {
    std::cerr << "hism: " << e.what() << "\n";
    return e.exit_code();
  } catch (const Error& e) {
    std::cerr << "hism: " << e.what() << "\n";
    return app::exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "hism: " << e.what() << "\n";
    return app::exit_code::io;
  } catch (const std::exception& e) {
    std::cerr << "hism: " << e.what() << "\n";
    return app::exit_code::failure;
  }
}
