#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmnet/cli.hpp"
#include "pmnet/error.hpp"

namespace {

struct CommandArgs {
    std::string config_path;
    pmnet::RunConfig overrides;

    /// Config file first, then flags on top.
    pmnet::RunConfig merged() const {
        pmnet::RunConfig config;
        if (!config_path.empty()) config = pmnet::RunConfig::from_file(config_path);
        for (const auto& [key, value] : overrides.values()) config.set_flag(key, value);
        return config;
    }
};

void add_string_option(CLI::App* cmd, CommandArgs& args, const std::string& flag,
                       const std::string& key, const std::string& description) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& value) { args.overrides.set_flag(key, value); },
        description);
}

void add_bool_flag(CLI::App* cmd, CommandArgs& args, const std::string& flag,
                   const std::string& key, const std::string& description) {
    cmd->add_flag_callback(
        flag, [&args, key] { args.overrides.set_flag(key, "true"); }, description);
}

void add_common_model_options(CLI::App* cmd, CommandArgs& args) {
    add_string_option(cmd, args, "--feature-dim", "feature_dim", "input feature dimension F");
    add_string_option(cmd, args, "--hidden-dims", "hidden_dims",
                      "comma-separated hidden widths of the embedding net");
    add_string_option(cmd, args, "--embed-dim", "embed_dim", "embedding dimension D");
    add_string_option(cmd, args, "--key-dim", "key_dim", "key/query projection dimension L");
    add_string_option(cmd, args, "--value-dim", "value_dim", "value projection dimension U");
    add_string_option(cmd, args, "--heads", "heads", "number of attention heads H");
    add_string_option(cmd, args, "--k", "k", "prototypes per scene");
    add_string_option(cmd, args, "--cluster-method", "cluster_method",
                      "mean | kmeans | agglomerative");
    add_string_option(cmd, args, "--mode", "mode", "standard | relevance-as-prediction");
    add_string_option(cmd, args, "--threshold", "threshold", "decision threshold in (0,1)");
    add_string_option(cmd, args, "--phase1-loss", "phase1_loss", "cross_entropy | triplet");
    add_string_option(cmd, args, "--phase1-lr", "phase1_lr", "phase-1 learning rate");
    add_string_option(cmd, args, "--phase2-lr", "phase2_lr", "phase-2 learning rate");
    add_string_option(cmd, args, "--phase1-epochs", "phase1_epochs", "phase-1 epoch count");
    add_string_option(cmd, args, "--phase2-epochs", "phase2_epochs", "phase-2 epoch count");
    add_string_option(cmd, args, "--batch-size", "batch_size", "training batch size");
    add_string_option(cmd, args, "--patience", "patience", "plateau patience in epochs");
    add_string_option(cmd, args, "--decay-factor", "decay_factor", "plateau decay factor");
    add_string_option(cmd, args, "--merge-map", "merge_map",
                      "label merge map file (source -> target lines)");
    add_bool_flag(cmd, args, "--freeze-embedding", "freeze_embedding",
                  "keep the embedding fixed in phase 2");
}

void add_data_options(CLI::App* cmd, CommandArgs& args) {
    add_string_option(cmd, args, "--single", "single_table", "single-scene feature table");
    add_string_option(cmd, args, "--multi-train", "multi_train_table",
                      "multi-scene training table");
    add_string_option(cmd, args, "--multi-test", "multi_test_table", "multi-scene test table");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prototype-based memory network over feature vectors"};
    app.require_subcommand(1);

    CommandArgs synth_args, train_args, eval_args, ablate_args, grad_args;
    std::function<int()> action;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("config", synth_args.config_path, "config file (key = value lines)");
    add_string_option(synth, synth_args, "--out-dir", "out_dir", "output directory");
    add_string_option(synth, synth_args, "--scenes", "scenes", "number of scenes S");
    add_string_option(synth, synth_args, "--feature-dim", "feature_dim", "feature dimension F");
    add_string_option(synth, synth_args, "--samples-per-scene", "samples_per_scene",
                      "single-scene samples per scene");
    add_string_option(synth, synth_args, "--multi-train", "multi_train",
                      "number of multi-scene training samples");
    add_string_option(synth, synth_args, "--multi-test", "multi_test",
                      "number of multi-scene test samples");
    add_string_option(synth, synth_args, "--scenes-min", "scenes_min", "min scenes per image");
    add_string_option(synth, synth_args, "--scenes-max", "scenes_max", "max scenes per image");
    add_string_option(synth, synth_args, "--noise-sigma", "noise_sigma", "per-dim noise sigma");
    add_string_option(synth, synth_args, "--center-scale", "center_scale", "center scale");
    add_string_option(synth, synth_args, "--combine", "combine", "sum | average");
    add_string_option(synth, synth_args, "--seed", "seed", "generator seed");
    synth->callback([&] { action = [&] { return pmnet::cmd_synth(synth_args.merged()); }; });

    CLI::App* train = app.add_subcommand("train", "run the two-phase training pipeline");
    train->add_option("config", train_args.config_path, "config file (key = value lines)");
    add_string_option(train, train_args, "--out-dir", "out_dir", "output directory");
    add_string_option(train, train_args, "--checkpoint", "checkpoint", "checkpoint file name");
    add_string_option(train, train_args, "--seed", "seed", "run seed");
    add_data_options(train, train_args);
    add_common_model_options(train, train_args);
    train->callback([&] { action = [&] { return pmnet::cmd_train(train_args.merged()); }; });

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a test table");
    evaluate->add_option("config", eval_args.config_path, "config file (key = value lines)");
    add_string_option(evaluate, eval_args, "--out-dir", "out_dir", "output directory");
    add_string_option(evaluate, eval_args, "--checkpoint", "checkpoint", "checkpoint path");
    add_string_option(evaluate, eval_args, "--multi-test", "multi_test_table",
                      "multi-scene test table");
    add_string_option(evaluate, eval_args, "--threshold", "threshold",
                      "decision threshold (default: the checkpoint's)");
    add_string_option(evaluate, eval_args, "--sweep-thresholds", "sweep_thresholds",
                      "also sweep N evenly spaced thresholds into threshold_curve.csv");
    evaluate->callback([&] { action = [&] { return pmnet::cmd_evaluate(eval_args.merged()); }; });

    CLI::App* ablate = app.add_subcommand("ablate", "run an ablation sweep");
    ablate->add_option("config", ablate_args.config_path, "config file (key = value lines)");
    add_string_option(ablate, ablate_args, "--out-dir", "out_dir", "output directory");
    add_string_option(ablate, ablate_args, "--sweep", "sweep",
                      "heads | clusters | freeze | loss | mode");
    add_string_option(ablate, ablate_args, "--sweep-seeds", "sweep_seeds",
                      "seeds per setting (default 3)");
    add_string_option(ablate, ablate_args, "--seed", "seed", "base seed");
    add_data_options(ablate, ablate_args);
    add_common_model_options(ablate, ablate_args);
    ablate->callback([&] { action = [&] { return pmnet::cmd_ablate(ablate_args.merged()); }; });

    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "compare analytic gradients against central differences");
    gradcheck->add_option("config", grad_args.config_path, "config file (key = value lines)");
    add_string_option(gradcheck, grad_args, "--seed", "seed", "base seed");
    add_string_option(gradcheck, grad_args, "--seeds", "seeds", "number of independent seeds");
    add_string_option(gradcheck, grad_args, "--tolerance", "tolerance",
                      "max relative error (default 1e-4)");
    add_string_option(gradcheck, grad_args, "--fd-epsilon", "fd_epsilon",
                      "central difference step");
    add_string_option(gradcheck, grad_args, "--corrupt-group", "corrupt_group",
                      "self-test hook: corrupt this group's analytic gradients");
    gradcheck->callback(
        [&] { action = [&] { return pmnet::cmd_gradcheck(grad_args.merged()); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        return action ? action() : 1;
    } catch (const pmnet::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pmnet::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pmnet::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pmnet::StateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pmnet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
