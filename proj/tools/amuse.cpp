// Command-line front end: gen / train / select / eval / check.
// Exit codes: 0 success, 1 verification failure, 2 usage or input error,
// 3 numeric abort.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "amuse/dataio.hpp"
#include "amuse/manifest.hpp"
#include "amuse/rng.hpp"
#include "amuse/selector.hpp"
#include "amuse/synthgen.hpp"
#include "amuse/trainer.hpp"
#include "amuse/verify.hpp"
#include "amuse/wordspace.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using amuse::RunManifest;

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

// Times the command body and emits the manifest whether it succeeds or
// fails. When no manifest path is available the JSON goes to stderr.
class ManifestScope {
 public:
  ManifestScope(std::string command, uint64_t seed)
      : start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.tool_version = kVersion;
    manifest_.seed = seed;
  }

  RunManifest& manifest() { return manifest_; }

  void set_path(const std::string& path) { path_ = path; }

  void add_input(const std::string& path) {
    manifest_.inputs.emplace_back(path, amuse::file_digest(path));
  }

  int finish(int code, const std::string& status) {
    manifest_.status = status;
    manifest_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    try {
      if (!path_.empty()) {
        amuse::write_manifest(manifest_, path_);
      } else {
        std::cerr << manifest_.to_json();
      }
    } catch (const std::exception& e) {
      std::cerr << "warning: could not write manifest: " << e.what() << "\n"
                << manifest_.to_json();
    }
    return code;
  }

 private:
  RunManifest manifest_;
  std::string path_;
  std::chrono::steady_clock::time_point start_;
};

int guarded(ManifestScope& scope, const std::function<int()>& body) {
  try {
    return scope.finish(body(), "ok");
  } catch (const amuse::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return scope.finish(3, std::string("error: ") + e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return scope.finish(2, std::string("error: ") + e.what());
  }
}

struct GenOptions {
  std::string out;
  amuse::SynthSpec spec;
};

int cmd_gen(const GenOptions& opt) {
  ManifestScope scope("gen", opt.spec.seed);
  auto& cfg = scope.manifest().config;
  cfg["videos"] = std::to_string(opt.spec.n_videos);
  cfg["labels"] = std::to_string(opt.spec.n_labels);
  cfg["topics"] = std::to_string(opt.spec.n_topics);
  cfg["source_n"] = std::to_string(opt.spec.n_source);
  cfg["d_raw"] = std::to_string(opt.spec.d_raw);
  cfg["d_sem"] = std::to_string(opt.spec.d_sem);
  cfg["noise"] = amuse::fmt_double(opt.spec.noise_sigma);
  cfg["zero_shot"] = amuse::fmt_double(opt.spec.zero_shot_frac);
  cfg["frames_min"] = std::to_string(opt.spec.frames_min);
  cfg["frames_max"] = std::to_string(opt.spec.frames_max);
  cfg["shift_scale_lo"] = amuse::fmt_double(opt.spec.shift_scale_lo);
  cfg["shift_scale_hi"] = amuse::fmt_double(opt.spec.shift_scale_hi);
  cfg["shift_offset_norm"] = amuse::fmt_double(opt.spec.shift_offset_norm);

  return guarded(scope, [&] {
    fs::create_directories(opt.out);
    scope.set_path(join_path(opt.out, "manifest.json"));
    amuse::SynthCorpus corpus = amuse::generate_corpus(opt.spec);
    amuse::write_corpus(corpus, opt.out);
    for (const char* f : {"wordvecs.txt", "topics.tsv", "source.csv",
                          "target.csv", "videos.csv", "candidates.csv",
                          "truth.tsv"}) {
      scope.manifest().outputs.push_back(join_path(opt.out, f));
    }
    std::cout << "generated " << corpus.videos.size() << " videos, "
              << corpus.source.size() << " source examples under " << opt.out
              << "\n";
    return 0;
  });
}

struct TrainOptions {
  std::string config_path;
  std::string wordvecs, topics, source, target, videos, candidates, truth;
  std::string out;
  amuse::TrainConfig config;
  // which flags were set explicitly on the command line
  std::map<std::string, bool> explicit_flags;
};

void apply_config_map(const std::map<std::string, std::string>& kv,
                      amuse::TrainConfig& config) {
  auto to_double = [](const std::string& v, const std::string& key) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
      throw std::runtime_error("config: bad number for " + key + ": '" + v + "'");
    }
    return x;
  };
  auto to_bool = [](const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config: bad boolean for " + key + ": '" + v + "'");
  };
  for (const auto& [key, value] : kv) {
    if (key == "batch_size") config.batch_size = int(to_double(value, key));
    else if (key == "learning_rate") config.learning_rate = to_double(value, key);
    else if (key == "max_epochs") config.max_epochs = int(to_double(value, key));
    else if (key == "seed") config.seed = uint64_t(to_double(value, key));
    else if (key == "alpha") config.hyper.alpha = to_double(value, key);
    else if (key == "eta") config.hyper.eta = to_double(value, key);
    else if (key == "gamma") config.hyper.gamma = to_double(value, key);
    else if (key == "mu") config.hyper.mu = to_double(value, key);
    else if (key == "lambda") config.lambda = to_double(value, key);
    else if (key == "n_neg") config.n_neg = int(to_double(value, key));
    else if (key == "d_hidden") config.d_hidden = int(to_double(value, key));
    else if (key == "d_feat") config.d_feat = int(to_double(value, key));
    else if (key == "d_sem") { /* informational; taken from the word vectors */ }
    else if (key == "adam_beta1") config.adam.beta1 = to_double(value, key);
    else if (key == "adam_beta2") config.adam.beta2 = to_double(value, key);
    else if (key == "adam_eps") config.adam.eps = to_double(value, key);
    else if (key == "loss.attend_negatives") config.hyper.attend_negatives = to_bool(value, key);
    else if (key == "popularity.raw_counts") config.raw_counts = to_bool(value, key);
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

int cmd_train(TrainOptions& opt) {
  // Precedence: defaults < config file < explicit command-line flags.
  if (!opt.config_path.empty()) {
    amuse::TrainConfig from_file = opt.config;
    try {
      apply_config_map(amuse::parse_config_file(opt.config_path), from_file);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    amuse::TrainConfig& c = opt.config;
    if (!opt.explicit_flags["seed"]) c.seed = from_file.seed;
    if (!opt.explicit_flags["batch"]) c.batch_size = from_file.batch_size;
    if (!opt.explicit_flags["lr"]) c.learning_rate = from_file.learning_rate;
    if (!opt.explicit_flags["max-epochs"]) c.max_epochs = from_file.max_epochs;
    if (!opt.explicit_flags["alpha"]) c.hyper.alpha = from_file.hyper.alpha;
    if (!opt.explicit_flags["mu"]) c.hyper.mu = from_file.hyper.mu;
    if (!opt.explicit_flags["lambda"]) c.lambda = from_file.lambda;
    c.hyper.eta = from_file.hyper.eta;
    c.hyper.gamma = from_file.hyper.gamma;
    c.n_neg = from_file.n_neg;
    c.d_hidden = from_file.d_hidden;
    c.d_feat = from_file.d_feat;
    c.adam = from_file.adam;
    c.hyper.attend_negatives = from_file.hyper.attend_negatives;
    c.raw_counts = from_file.raw_counts;
  }

  ManifestScope scope("train", opt.config.seed);
  auto& cfg = scope.manifest().config;
  cfg["batch_size"] = std::to_string(opt.config.batch_size);
  cfg["learning_rate"] = amuse::fmt_double(opt.config.learning_rate);
  cfg["max_epochs"] = std::to_string(opt.config.max_epochs);
  cfg["alpha"] = amuse::fmt_double(opt.config.hyper.alpha);
  cfg["eta"] = amuse::fmt_double(opt.config.hyper.eta);
  cfg["gamma"] = amuse::fmt_double(opt.config.hyper.gamma);
  cfg["mu"] = amuse::fmt_double(opt.config.hyper.mu);
  cfg["lambda"] = amuse::fmt_double(opt.config.lambda);
  cfg["n_neg"] = std::to_string(opt.config.n_neg);
  cfg["d_hidden"] = std::to_string(opt.config.d_hidden);
  cfg["d_feat"] = std::to_string(opt.config.d_feat);

  return guarded(scope, [&] {
    fs::create_directories(opt.out);
    scope.set_path(join_path(opt.out, "manifest.json"));
    scope.add_input(opt.wordvecs);
    scope.add_input(opt.topics);
    scope.add_input(opt.source);
    if (!opt.target.empty()) scope.add_input(opt.target);
    if (!opt.videos.empty()) {
      scope.add_input(opt.videos);
      scope.add_input(opt.candidates);
      scope.add_input(opt.truth);
    }

    amuse::WordSpace ws = amuse::load_word_vectors(opt.wordvecs);
    amuse::TopicList topics = amuse::load_topic_list(opt.topics);

    std::vector<amuse::LabeledExample> source;
    for (auto& row : amuse::read_feature_csv(opt.source)) {
      if (row.labels.empty()) {
        throw std::runtime_error("source row " + row.video_id + " has no labels");
      }
      source.push_back({std::move(row.features), std::move(row.labels)});
    }
    std::vector<amuse::Vec> target_pool;
    if (!opt.target.empty()) {
      for (auto& row : amuse::read_feature_csv(opt.target)) {
        target_pool.push_back(std::move(row.features));
      }
    }
    std::vector<amuse::VideoRecord> valid;
    if (!opt.videos.empty()) {
      if (opt.candidates.empty() || opt.truth.empty()) {
        throw std::runtime_error("--videos requires --candidates and --truth");
      }
      auto truth = amuse::read_truth_tsv(opt.truth);
      valid = amuse::assemble_videos(amuse::read_feature_csv(opt.videos),
                                     amuse::read_candidate_csv(opt.candidates),
                                     &truth);
      for (const auto& v : valid) {
        if (!v.ground_truth) {
          throw std::runtime_error("video '" + v.video_id + "' missing ground truth");
        }
      }
    }

    amuse::TrainResult result =
        amuse::train(opt.config, ws, topics, source, target_pool, valid);

    amuse::Checkpoint ck;
    ck.params = result.params;
    ck.seed = opt.config.seed;
    ck.hyper = opt.config.hyper;
    ck.lambda = opt.config.lambda;
    std::string ck_path = join_path(opt.out, "checkpoint.bin");
    std::string log_path = join_path(opt.out, "train_log.csv");
    amuse::save_checkpoint(ck, ck_path);
    amuse::write_text_atomic(log_path, amuse::history_csv(result.history));
    scope.manifest().outputs.push_back(ck_path);
    scope.manifest().outputs.push_back(log_path);

    if (!result.history.rows.empty()) {
      const auto& last = result.history.rows.back();
      std::cout << "trained " << last.epoch << " epochs; best epoch "
                << result.best_epoch << "; final val_acc "
                << amuse::fmt_double(last.val_acc) << "\n";
    } else {
      std::cout << "trained 0 epochs; checkpoint holds initial parameters\n";
    }
    return 0;
  });
}

struct ScoreOptions {
  std::string checkpoint, wordvecs, topics, videos, candidates, truth;
  std::string out, scores_out;
  double lambda = std::nan("");
  bool use_random = false;
  uint64_t seed = 42;
  int rounds = 5;
  bool raw_counts = false;
};

std::vector<amuse::VideoRecord> load_videos(const ScoreOptions& opt, bool need_truth) {
  std::optional<std::vector<std::pair<std::string, int>>> truth;
  if (!opt.truth.empty()) truth = amuse::read_truth_tsv(opt.truth);
  if (need_truth && !truth) {
    throw std::runtime_error("this command needs --truth");
  }
  auto videos = amuse::assemble_videos(amuse::read_feature_csv(opt.videos),
                                       amuse::read_candidate_csv(opt.candidates),
                                       truth ? &*truth : nullptr);
  if (need_truth) {
    for (const auto& v : videos) {
      if (!v.ground_truth) {
        throw std::runtime_error("video '" + v.video_id + "' missing ground truth");
      }
    }
  }
  return videos;
}

int cmd_select(const ScoreOptions& opt) {
  ManifestScope scope("select", opt.seed);
  return guarded(scope, [&] {
    scope.set_path(opt.out + ".manifest.json");
    scope.add_input(opt.checkpoint);
    scope.add_input(opt.wordvecs);
    scope.add_input(opt.topics);
    scope.add_input(opt.videos);
    scope.add_input(opt.candidates);

    amuse::Checkpoint ck = amuse::load_checkpoint(opt.checkpoint);
    amuse::WordSpace ws = amuse::load_word_vectors(opt.wordvecs);
    amuse::TopicList topics =
        amuse::filter_topics(amuse::load_topic_list(opt.topics), ws);
    auto videos = load_videos(opt, false);
    if (!videos.empty() &&
        videos[0].candidates[0].feature.size() != ck.params.dims.d_raw) {
      throw std::runtime_error("feature dimension does not match the checkpoint");
    }
    double lambda = std::isnan(opt.lambda) ? ck.lambda : opt.lambda;
    scope.manifest().config["lambda"] = amuse::fmt_double(lambda);

    std::vector<amuse::EvalRow> rows;
    for (const auto& video : videos) {
      amuse::EvalRow row;
      row.video_id = video.video_id;
      row.selected = amuse::select_thumbnail(ck.params, ws, topics, video,
                                             lambda, opt.raw_counts, &row.frames);
      rows.push_back(std::move(row));
    }
    amuse::write_text_atomic(opt.out, amuse::score_report_csv(rows));
    scope.manifest().outputs.push_back(opt.out);
    std::cout << "scored " << videos.size() << " videos -> " << opt.out << "\n";
    return 0;
  });
}

int cmd_eval(const ScoreOptions& opt) {
  ManifestScope scope("eval", opt.seed);
  return guarded(scope, [&] {
    if (!opt.out.empty()) scope.set_path(opt.out + ".manifest.json");
    for (const std::string& p :
         {opt.checkpoint, opt.wordvecs, opt.topics, opt.videos, opt.candidates,
          opt.truth}) {
      if (!p.empty()) scope.add_input(p);
    }

    auto videos = load_videos(opt, true);
    std::string json;
    std::string scores_csv;
    if (opt.use_random) {
      std::vector<double> accs;
      std::vector<uint64_t> seeds;
      for (int r = 0; r < opt.rounds; ++r) {
        seeds.push_back(opt.seed + uint64_t(r));
        accs.push_back(amuse::random_accuracy(videos, seeds.back()));
      }
      double mean = 0.0;
      for (double a : accs) mean += a;
      mean /= double(accs.size());
      double var = 0.0;
      for (double a : accs) var += (a - mean) * (a - mean);
      double std_dev = accs.size() > 1 ? std::sqrt(var / double(accs.size() - 1)) : 0.0;
      json = amuse::eval_summary_json(mean, std_dev, seeds, 0.0);
    } else {
      if (opt.checkpoint.empty()) {
        throw std::runtime_error("eval needs --checkpoint (or --random)");
      }
      amuse::Checkpoint ck = amuse::load_checkpoint(opt.checkpoint);
      amuse::WordSpace ws = amuse::load_word_vectors(opt.wordvecs);
      amuse::TopicList topics =
          amuse::filter_topics(amuse::load_topic_list(opt.topics), ws);
      if (videos[0].candidates[0].feature.size() != ck.params.dims.d_raw) {
        throw std::runtime_error("feature dimension does not match the checkpoint");
      }
      double lambda = std::isnan(opt.lambda) ? ck.lambda : opt.lambda;
      scope.manifest().config["lambda"] = amuse::fmt_double(lambda);
      amuse::EvalResult result =
          amuse::evaluate(ck.params, ws, topics, videos, lambda, opt.raw_counts);
      json = amuse::eval_summary_json(result.accuracy, 0.0, {opt.seed}, lambda);
      scores_csv = amuse::score_report_csv(result.rows);
    }

    std::cout << json;
    if (!opt.out.empty()) {
      amuse::write_text_atomic(opt.out, json);
      scope.manifest().outputs.push_back(opt.out);
    }
    if (!opt.scores_out.empty() && !scores_csv.empty()) {
      amuse::write_text_atomic(opt.scores_out, scores_csv);
      scope.manifest().outputs.push_back(opt.scores_out);
    }
    return 0;
  });
}

struct CheckOptions {
  bool grads = false, mmd = false, popularity = false;
  uint64_t seed = 42;
  std::string sabotage;
  std::string out;
};

int cmd_check(const CheckOptions& opt) {
  ManifestScope scope("check", opt.seed);
  return guarded(scope, [&] {
    if (!opt.out.empty()) scope.set_path(opt.out + ".manifest.json");
    bool all = !(opt.grads || opt.mmd || opt.popularity);
    amuse::CheckReport report;
    if (all || opt.grads) {
      report.merge(amuse::check_gradients(opt.seed, 10, 20, 1e-5, 1e-4, opt.sabotage));
    }
    if (all || opt.mmd) report.merge(amuse::check_mmd(opt.seed));
    if (all || opt.popularity) report.merge(amuse::check_popularity(opt.seed));

    std::string table = report.table();
    std::cout << table;
    if (!opt.out.empty()) {
      amuse::write_text_atomic(opt.out, table);
      scope.manifest().outputs.push_back(opt.out);
    }
    if (!report.all_pass()) {
      std::cerr << "verification failed:\n";
      for (const auto& r : report.rows) {
        if (!r.pass) std::cerr << "  " << r.name << "\n";
      }
      return 1;
    }
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attended visual-semantic thumbnail selection pipeline"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic corpus");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--seed", gen.spec.seed, "corpus seed");
  gen_cmd->add_option("--videos", gen.spec.n_videos)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--labels", gen.spec.n_labels)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--topics", gen.spec.n_topics)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--source-n", gen.spec.n_source)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d-raw", gen.spec.d_raw)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d-sem", gen.spec.d_sem)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--noise", gen.spec.noise_sigma)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--zero-shot", gen.spec.zero_shot_frac)->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--frames-min", gen.spec.frames_min)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--frames-max", gen.spec.frames_max)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--shift-scale-lo", gen.spec.shift_scale_lo);
  gen_cmd->add_option("--shift-scale-hi", gen.spec.shift_scale_hi);
  gen_cmd->add_option("--shift-offset", gen.spec.shift_offset_norm);

  TrainOptions tr;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--config", tr.config_path, "key = value config file");
  train_cmd->add_option("--wordvecs", tr.wordvecs)->required();
  train_cmd->add_option("--topics", tr.topics)->required();
  train_cmd->add_option("--source", tr.source)->required();
  train_cmd->add_option("--target", tr.target);
  train_cmd->add_option("--videos", tr.videos);
  train_cmd->add_option("--candidates", tr.candidates);
  train_cmd->add_option("--truth", tr.truth);
  train_cmd->add_option("--out", tr.out, "output directory")->required();
  auto* f_seed = train_cmd->add_option("--seed", tr.config.seed);
  auto* f_batch = train_cmd->add_option("--batch", tr.config.batch_size);
  auto* f_lr = train_cmd->add_option("--lr", tr.config.learning_rate);
  auto* f_epochs = train_cmd->add_option("--max-epochs", tr.config.max_epochs);
  auto* f_alpha = train_cmd->add_option("--alpha", tr.config.hyper.alpha);
  auto* f_mu = train_cmd->add_option("--mu", tr.config.hyper.mu);
  auto* f_lambda = train_cmd->add_option("--lambda", tr.config.lambda);

  ScoreOptions sel;
  CLI::App* select_cmd = app.add_subcommand("select", "score and pick thumbnails");
  select_cmd->add_option("--checkpoint", sel.checkpoint)->required();
  select_cmd->add_option("--wordvecs", sel.wordvecs)->required();
  select_cmd->add_option("--topics", sel.topics)->required();
  select_cmd->add_option("--videos", sel.videos)->required();
  select_cmd->add_option("--candidates", sel.candidates)->required();
  select_cmd->add_option("--lambda", sel.lambda);
  select_cmd->add_flag("--raw-counts", sel.raw_counts);
  select_cmd->add_option("--out", sel.out, "score report csv")->required();

  ScoreOptions ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate selection accuracy");
  eval_cmd->add_option("--checkpoint", ev.checkpoint);
  eval_cmd->add_option("--wordvecs", ev.wordvecs);
  eval_cmd->add_option("--topics", ev.topics);
  eval_cmd->add_option("--videos", ev.videos)->required();
  eval_cmd->add_option("--candidates", ev.candidates)->required();
  eval_cmd->add_option("--truth", ev.truth)->required();
  eval_cmd->add_option("--lambda", ev.lambda);
  eval_cmd->add_flag("--raw-counts", ev.raw_counts);
  eval_cmd->add_flag("--random", ev.use_random, "uniform reference selector");
  eval_cmd->add_option("--seed", ev.seed);
  eval_cmd->add_option("--rounds", ev.rounds)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", ev.out, "summary json");
  eval_cmd->add_option("--scores", ev.scores_out, "per-frame score csv");

  CheckOptions chk;
  CLI::App* check_cmd = app.add_subcommand("check", "run the verification oracles");
  check_cmd->add_flag("--grads", chk.grads);
  check_cmd->add_flag("--mmd", chk.mmd);
  check_cmd->add_flag("--popularity", chk.popularity);
  check_cmd->add_option("--seed", chk.seed);
  check_cmd->add_option("--out", chk.out, "report path");
  check_cmd->add_option("--sabotage", chk.sabotage)->group("");  // test hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen_cmd->parsed()) return cmd_gen(gen);
  if (train_cmd->parsed()) {
    tr.explicit_flags["seed"] = f_seed->count() > 0;
    tr.explicit_flags["batch"] = f_batch->count() > 0;
    tr.explicit_flags["lr"] = f_lr->count() > 0;
    tr.explicit_flags["max-epochs"] = f_epochs->count() > 0;
    tr.explicit_flags["alpha"] = f_alpha->count() > 0;
    tr.explicit_flags["mu"] = f_mu->count() > 0;
    tr.explicit_flags["lambda"] = f_lambda->count() > 0;
    return cmd_train(tr);
  }
  if (select_cmd->parsed()) return cmd_select(sel);
  if (eval_cmd->parsed()) return cmd_eval(ev);
  if (check_cmd->parsed()) return cmd_check(chk);
  return 2;
}
