#include "longtie/config.hpp"

#include <cstdio>
#include <set>

#include "longtie/error.hpp"

namespace longtie {

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " config must be a JSON object");
  std::set<std::string> ok(known.begin(), known.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw InvalidArgument(std::string("unknown ") + what + " config key '" + key + "'");
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
    }
  }
}

}  // namespace

void to_json(nlohmann::json& j, const PhaseConfig& c) {
  j = {{"window_months", c.window_months}, {"total_months", c.total_months}};
}

void from_json(const nlohmann::json& j, PhaseConfig& c) {
  reject_unknown(j, {"window_months", "total_months"}, "phase");
  read(j, "window_months", c.window_months);
  read(j, "total_months", c.total_months);
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = {{"delta", p.delta},         {"q", p.q},
       {"walk_len", p.walk_len},   {"meeting_scale", p.meeting_scale},
       {"duration_scale", p.duration_scale}};
  j["c_init"] = p.c_init ? nlohmann::json(*p.c_init) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  reject_unknown(j, {"delta", "q", "walk_len", "meeting_scale", "c_init", "duration_scale"}, "model");
  read(j, "delta", p.delta);
  read(j, "q", p.q);
  read(j, "walk_len", p.walk_len);
  read(j, "meeting_scale", p.meeting_scale);
  read(j, "duration_scale", p.duration_scale);
  if (auto it = j.find("c_init"); it != j.end()) {
    if (it->is_null()) p.c_init.reset();
    else p.c_init = it->get<double>();
  }
}

void to_json(nlohmann::json& j, const FitConfig& c) {
  j = {{"dims", c.dims},
       {"delta", c.delta},
       {"delta_grid", c.delta_grid},
       {"max_epochs", c.max_epochs},
       {"nodes_per_epoch", c.nodes_per_epoch},
       {"test_nodes", c.test_nodes},
       {"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"weight_decay", c.weight_decay},
       {"adam_beta1", c.adam_beta1},
       {"adam_beta2", c.adam_beta2},
       {"adam_epsilon", c.adam_epsilon},
       {"init_sd", c.init_sd},
       {"target_phase", c.target_phase},
       {"pool_phases", c.pool_phases},
       {"loss", c.loss == LossKind::Absolute ? "absolute" : "squared"},
       {"plateau_epochs", c.plateau_epochs},
       {"plateau_tolerance", c.plateau_tolerance},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, FitConfig& c) {
  reject_unknown(j,
                 {"dims", "delta", "delta_grid", "max_epochs", "nodes_per_epoch", "test_nodes", "batch_size",
                  "learning_rate", "weight_decay", "adam_beta1", "adam_beta2", "adam_epsilon", "init_sd",
                  "target_phase", "pool_phases", "loss", "plateau_epochs", "plateau_tolerance", "seed", "threads"},
                 "fit");
  read(j, "dims", c.dims);
  read(j, "delta", c.delta);
  read(j, "delta_grid", c.delta_grid);
  read(j, "max_epochs", c.max_epochs);
  read(j, "nodes_per_epoch", c.nodes_per_epoch);
  read(j, "test_nodes", c.test_nodes);
  read(j, "batch_size", c.batch_size);
  read(j, "learning_rate", c.learning_rate);
  read(j, "weight_decay", c.weight_decay);
  read(j, "adam_beta1", c.adam_beta1);
  read(j, "adam_beta2", c.adam_beta2);
  read(j, "adam_epsilon", c.adam_epsilon);
  read(j, "init_sd", c.init_sd);
  read(j, "target_phase", c.target_phase);
  read(j, "pool_phases", c.pool_phases);
  read(j, "plateau_epochs", c.plateau_epochs);
  read(j, "plateau_tolerance", c.plateau_tolerance);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  if (auto it = j.find("loss"); it != j.end()) {
    const auto s = it->get<std::string>();
    if (s == "absolute") c.loss = LossKind::Absolute;
    else if (s == "squared") c.loss = LossKind::Squared;
    else throw InvalidArgument("fit.loss must be 'absolute' or 'squared'");
  }
}

void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = {{"nodes", s.nodes},
       {"dims", s.dims},
       {"endowment_mu", s.endowment_mu},
       {"endowment_sigma", s.endowment_sigma},
       {"equal_endowments", s.equal_endowments},
       {"family", s.family == GraphFamily::ErdosRenyi ? "erdos_renyi" : "configuration"},
       {"mean_degree", s.mean_degree},
       {"phases", s.phases}};
}

void from_json(const nlohmann::json& j, SynthSpec& s) {
  reject_unknown(j,
                 {"nodes", "dims", "endowment_mu", "endowment_sigma", "equal_endowments", "family", "mean_degree",
                  "phases"},
                 "synth");
  read(j, "nodes", s.nodes);
  read(j, "dims", s.dims);
  read(j, "endowment_mu", s.endowment_mu);
  read(j, "endowment_sigma", s.endowment_sigma);
  read(j, "equal_endowments", s.equal_endowments);
  read(j, "mean_degree", s.mean_degree);
  read(j, "phases", s.phases);
  if (auto it = j.find("family"); it != j.end()) {
    const auto f = it->get<std::string>();
    if (f == "erdos_renyi") s.family = GraphFamily::ErdosRenyi;
    else if (f == "configuration") s.family = GraphFamily::Configuration;
    else throw InvalidArgument("synth.family must be 'erdos_renyi' or 'configuration'");
  }
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace longtie
