#include "vnrg/vnrg.h"

#include <cstring>
#include <string>

#include "vnrg/checkpoint.hpp"
#include "vnrg/diagnostics.hpp"
#include "vnrg/dmrg.hpp"
#include "vnrg/error.hpp"
#include "vnrg/models.hpp"
#include "vnrg/nrg.hpp"
#include "vnrg/runner.hpp"
#include "vnrg/variational.hpp"

struct vnrg_model {
  vnrg::Mpo mpo;
};

struct vnrg_state {
  vnrg::NrgMps state;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
vnrg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VNRG_OK;
  } catch (const vnrg::InvalidArgument& e) {
    g_last_error = e.what();
    return VNRG_ERR_INVALID_ARGUMENT;
  } catch (const vnrg::NumericalError& e) {
    g_last_error = e.what();
    return VNRG_ERR_NUMERICAL;
  } catch (const vnrg::FormatError& e) {
    g_last_error = e.what();
    return VNRG_ERR_FORMAT;
  } catch (const vnrg::IoError& e) {
    g_last_error = e.what();
    return VNRG_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VNRG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return VNRG_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw vnrg::InvalidArgument(what);
}

void copy_text(const std::string& text, char* buf, std::size_t size, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf && size > 0) {
    const std::size_t n = std::min(size - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
}

void copy_values(const std::vector<double>& v, double* out, std::size_t capacity, std::size_t* count) {
  if (count) *count = v.size();
  require(out != nullptr || capacity == 0, "null output buffer");
  std::copy_n(v.begin(), std::min(capacity, v.size()), out);
}

}  // namespace

extern "C" {

const char* vnrg_version(void) { return "1.0.0"; }

const char* vnrg_last_error(void) { return g_last_error.c_str(); }

vnrg_status vnrg_model_ising(size_t n, double hx, double hz, vnrg_model** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new vnrg_model{vnrg::build_tilted_ising_mpo({n, hx, hz})};
  });
}

vnrg_status vnrg_model_siam(int N, double lambda, double xi0, double eps_f, double U, int profile, vnrg_model** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(profile == 0 || profile == 1, "profile must be 0 (Wilson) or 1 (uniform)");
    vnrg::SiamParams p;
    p.N = N;
    p.lambda = lambda;
    p.xi0 = xi0;
    p.eps_f = eps_f;
    p.U = U;
    p.profile = profile == 0 ? vnrg::HoppingProfile::Wilson : vnrg::HoppingProfile::Uniform;
    *out = new vnrg_model{vnrg::build_siam_mpo(p)};
  });
}

void vnrg_model_free(vnrg_model* model) { delete model; }

vnrg_status vnrg_model_length(const vnrg_model* model, size_t* out) {
  return guarded([&] {
    require(model && out, "null argument");
    *out = model->mpo.length();
  });
}

vnrg_status vnrg_run_nrg(const vnrg_model* model, size_t D, size_t max_states, int use_sectors, vnrg_state** out) {
  return guarded([&] {
    require(model && out, "null argument");
    vnrg::NrgOptions opt;
    opt.D = D;
    opt.use_sectors = use_sectors != 0;
    if (max_states > 0) opt.max_states = max_states;
    *out = new vnrg_state{vnrg::run_nrg(model->mpo, opt).state};
  });
}

vnrg_status vnrg_run_dmrg(const vnrg_model* model, const vnrg_state* initial, size_t M, size_t D, size_t sweeps,
                          uint64_t seed, vnrg_state** out) {
  return guarded([&] {
    require(model && initial && out, "null argument");
    vnrg::TargetConfig cfg;
    cfg.M = M;
    cfg.D = D;
    cfg.sweeps = sweeps;
    cfg.seed = seed;
    *out = new vnrg_state{vnrg::dmrg_sweep(initial->state, model->mpo, cfg).state};
  });
}

void vnrg_sweep_options_default(vnrg_sweep_options* options) {
  if (!options) return;
  const vnrg::SweepConfig d;
  options->max_sweeps = d.max_sweeps;
  options->site_tol = d.site_tol;
  options->site_max_iters = d.site_max_iters;
  options->sweep_tol = d.sweep_tol;
  options->weights = 0;
  options->beta = d.weight.beta;
  options->optimize_bond_tensor = d.optimize_bond_tensor ? 1 : 0;
  options->use_sectors = d.use_sectors ? 1 : 0;
  options->D = d.D;
}

vnrg_status vnrg_run_vnrg(const vnrg_model* model, const vnrg_state* initial, const vnrg_sweep_options* options,
                          vnrg_state** out, double* final_cost) {
  return guarded([&] {
    require(model && initial && out, "null argument");
    vnrg::SweepConfig cfg;
    if (options) {
      require(options->weights >= 0 && options->weights <= 2, "weights must be 0, 1 or 2");
      cfg.max_sweeps = options->max_sweeps;
      cfg.site_tol = options->site_tol;
      cfg.site_max_iters = options->site_max_iters;
      cfg.sweep_tol = options->sweep_tol;
      cfg.weight.kind = static_cast<vnrg::WeightSpec::Kind>(options->weights);
      cfg.weight.beta = options->beta;
      cfg.optimize_bond_tensor = options->optimize_bond_tensor != 0;
      cfg.use_sectors = options->use_sectors != 0;
      cfg.D = options->D;
    }
    auto r = vnrg::sweep(initial->state, model->mpo, cfg);
    if (final_cost) *final_cost = r.spectrum.sum();
    *out = new vnrg_state{std::move(r.state)};
  });
}

void vnrg_state_free(vnrg_state* state) { delete state; }

vnrg_status vnrg_state_num_states(const vnrg_state* state, size_t* out) {
  return guarded([&] {
    require(state && out, "null argument");
    *out = state->state.num_states();
  });
}

vnrg_status vnrg_state_length(const vnrg_state* state, size_t* out) {
  return guarded([&] {
    require(state && out, "null argument");
    *out = state->state.length();
  });
}

vnrg_status vnrg_state_energies(const vnrg_state* state, const vnrg_model* model, double* out, size_t capacity,
                                size_t* count) {
  return guarded([&] {
    require(state && model, "null argument");
    copy_values(vnrg::energies_of(state->state, model->mpo).energies, out, capacity, count);
  });
}

vnrg_status vnrg_state_variances(const vnrg_state* state, const vnrg_model* model, double* out, size_t capacity,
                                 size_t* count) {
  return guarded([&] {
    require(state && model, "null argument");
    copy_values(vnrg::variances(state->state, model->mpo), out, capacity, count);
  });
}

vnrg_status vnrg_state_isometry_residual(const vnrg_state* state, double* out) {
  return guarded([&] {
    require(state && out, "null argument");
    *out = vnrg::max_isometry_residual(state->state);
  });
}

vnrg_status vnrg_state_save(const vnrg_state* state, const char* path) {
  return guarded([&] {
    require(state && path, "null argument");
    vnrg::save_state(state->state, path);
  });
}

vnrg_status vnrg_state_load(const char* path, vnrg_state** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new vnrg_state{vnrg::load_state(path)};
  });
}

vnrg_status vnrg_checkpoint_describe(const char* path, char* buf, size_t size, size_t* needed) {
  return guarded([&] {
    require(path != nullptr, "null path");
    copy_text(vnrg::describe_checkpoint(path), buf, size, needed);
  });
}

vnrg_status vnrg_experiment_run(const char* config_path, const vnrg_run_overrides* overrides) {
  return guarded([&] {
    require(config_path != nullptr, "null config path");
    auto cfg = vnrg::load_config(config_path);
    if (overrides) {
      if (overrides->output_dir) cfg.output_dir = overrides->output_dir;
      if (overrides->has_seed) cfg.seed = overrides->seed;
      if (overrides->oracle) cfg.oracle = true;
    }
    vnrg::run_experiment(cfg);
  });
}

vnrg_status vnrg_csv_compare(const char* path_a, const char* path_b, double tol, int* equal, char* buf, size_t size,
                             size_t* needed) {
  return guarded([&] {
    require(path_a && path_b && equal, "null argument");
    require(tol >= 0, "tolerance must be nonnegative");
    const auto r = vnrg::compare_csv_files(path_a, path_b, tol);
    *equal = r.equal ? 1 : 0;
    std::string text;
    for (const auto& d : r.differences) text += d + "\n";
    copy_text(text, buf, size, needed);
  });
}

}  // extern "C"
