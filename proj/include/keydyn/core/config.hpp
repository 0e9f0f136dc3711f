#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "keydyn/core/errors.hpp"
#include "keydyn/core/io.hpp"

namespace keydyn {

// All hyperparameters live in one JSON tree. Files and --set overrides are
// merged onto the defaults, so a config file only needs the keys it changes.
class Config {
 public:
  Config() : tree_(defaults()) {}

  static nlohmann::json defaults() {
    return nlohmann::json{
        {"task", "top_down"},
        {"seed", 0},
        {"image", {{"width", 160}, {"height", 120}}},
        {"sim",
         {{"dt", 0.1},
          {"v_max", 0.2},
          {"pusher_radius", 0.01},
          {"mu", 0.3},
          {"c_factor", 0.6},
          {"substeps", 5},
          {"workspace_half", 0.35},
          {"reset_half", 0.12},
          {"policy_angle_std", 0.45},
          {"episode_len", 40},
          {"n_trajectories", 50},
          {"goal_steps", 15},
          {"goal_pos_min_cm", 2.0},
          {"goal_angle_min_deg", 10.0},
          {"goal_max_tries", 100},
          {"store_images", false}}},
        {"vision",
         {{"eta", 0.05},
          {"sigma_px", 5.0},
          {"w_heatmap", 1.0},
          {"w_spatial", 1.0},
          {"noise_std", 0.0}}},
        {"latent",
         {{"K", 50},
          {"candidate_K", 100},
          {"K_star", 5},
          {"min_sep_px", 6.25},
          {"tau_conf", 0.5},
          {"space", "world"},
          {"stats_max_frames", 500}}},
        {"train",
         {{"lr", 1e-4},
          {"epochs", 200},
          {"batch", 64},
          {"horizon", 5},
          {"augment", true},
          {"aug_translation", 0.3},
          {"test_fraction", 0.1},
          {"adam_beta1", 0.9},
          {"adam_beta2", 0.999},
          {"adam_eps", 1e-8},
          {"alpha_init_diag", 3.0},
          {"hidden", 500}}},
        {"plan",
         {{"algorithm", "mppi"},
          {"n_samples", 1000},
          {"n_iterations", 3},
          {"horizon", 10},
          {"beta", 0.7},
          {"gamma", 10.0},
          {"sigma", 0.05},
          {"elite_fraction", 0.1},
          {"variance_floor", 1e-6},
          {"return_mean", false}}},
        {"eval",
         {{"n_pairs", 20},
          {"max_steps", 50},
          {"success_pos_cm", 3.0},
          {"success_angle_deg", 30.0},
          {"planner_samples", 300},
          {"workers", 2}}},
        {"imitate",
         {{"offsets_deg", {0.0, 30.0, 60.0, 90.0}},
          {"seeds_per_offset", 10},
          {"extra_steps", 15}}}};
  }

  void load_file(const std::filesystem::path& path) {
    nlohmann::json file = nlohmann::json::parse(read_text_file(path));
    tree_.merge_patch(file);
  }

  // "a.b.c=value"; value parsed as JSON when possible, else taken as a string
  void set_override(const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got: " + kv);
    std::string key = kv.substr(0, eq);
    std::string raw = kv.substr(eq + 1);
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;
    }
    nlohmann::json* node = &tree_;
    size_t start = 0;
    while (true) {
      size_t dot = key.find('.', start);
      std::string part = key.substr(start, dot - start);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }

  template <typename T>
  T get(const std::string& dotted_key) const {
    const nlohmann::json* node = &tree_;
    size_t start = 0;
    while (true) {
      size_t dot = dotted_key.find('.', start);
      std::string part = dotted_key.substr(start, dot - start);
      auto it = node->find(part);
      if (it == node->end()) throw Error("unknown config key: " + dotted_key);
      node = &*it;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return node->get<T>();
  }

  const nlohmann::json& tree() const { return tree_; }
  nlohmann::json& tree() { return tree_; }

  std::string dump() const { return tree_.dump(2); }

  // stable config identity for checkpoints / manifests
  uint64_t fingerprint() const {
    std::string s = tree_.dump();
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

 private:
  nlohmann::json tree_;
};

}  // namespace keydyn
