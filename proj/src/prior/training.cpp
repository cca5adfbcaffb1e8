#include "latentflow/prior/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include "latentflow/ad/checkpoint.hpp"
#include "latentflow/synth/dataset.hpp"

namespace lf::prior {

namespace fs = std::filesystem;
using ad::Tensor;
using ad::Var;

Tensor stack(const std::vector<Tensor>& items, const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw std::invalid_argument("stack: empty batch");
  const auto& first = items.at(idx[0]);
  ad::Shape shape = first.shape();
  if (shape.empty() || shape[0] != 1) throw std::invalid_argument("stack: items must have a leading extent of 1");
  shape[0] = idx.size();
  Tensor out(shape);
  const std::size_t n = first.size();
  for (std::size_t b = 0; b < idx.size(); ++b) {
    const auto& item = items.at(idx[b]);
    if (item.shape() != first.shape()) throw std::invalid_argument("stack: mixed item shapes");
    std::copy(item.values().begin(), item.values().end(), out.values().begin() + static_cast<std::ptrdiff_t>(b * n));
  }
  return out;
}

void write_log_csv(const fs::path& path, const std::vector<EpochLog>& log) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write training log " + path.string());
  os << "epoch,train_loss,val_loss\n";
  for (const auto& r : log)
    os << r.epoch << ',' << synth::format_double(r.train_loss) << ',' << synth::format_double(r.val_loss) << '\n';
}

namespace {

// Shared epoch loop. `batch_loss` builds the loss for one batch on a fresh tape.
using BatchLoss = std::function<Var(ad::Tape&, const ad::BoundParams&, const std::vector<std::size_t>&, Rng&)>;
using ValLoss = std::function<double(const ad::ParameterSet&)>;

struct LoopState {
  ad::ParameterSet params;
  ad::Adam adam;
  std::vector<EpochLog> log;
};

fs::path params_path(const TrainConfig& tc) { return tc.checkpoint_dir / (tc.name + ".ldad"); }
fs::path state_path(const TrainConfig& tc) { return tc.checkpoint_dir / (tc.name + ".state.ldad"); }

void save_state(const TrainConfig& tc, const LoopState& s) {
  if (tc.checkpoint_dir.empty()) return;
  fs::create_directories(tc.checkpoint_dir);
  ad::save_checkpoint(params_path(tc), s.params);
  ad::ParameterSet st = s.adam.export_state();
  std::vector<double> rows;
  for (const auto& r : s.log) rows.insert(rows.end(), {static_cast<double>(r.epoch), r.train_loss, r.val_loss});
  if (!rows.empty()) st.add("train.log", Tensor({s.log.size(), 3}, std::move(rows)));
  ad::save_checkpoint(state_path(tc), st);
  write_log_csv(tc.checkpoint_dir / (tc.name + "_log.csv"), s.log);
}

void load_state(const TrainConfig& tc, LoopState& s) {
  s.params = ad::load_checkpoint(params_path(tc));
  const auto st = ad::load_checkpoint(state_path(tc));
  ad::ParameterSet adam_state;
  for (const auto& name : st.names())
    if (name.rfind("adam.", 0) == 0) adam_state.add(name, st.at(name));
  s.adam.import_state(adam_state);
  s.log.clear();
  if (st.contains("train.log")) {
    const auto& t = st.at("train.log");
    for (std::size_t r = 0; r < t.dim(0); ++r)
      s.log.push_back({static_cast<std::size_t>(t[3 * r]), t[3 * r + 1], t[3 * r + 2]});
  }
}

TrainResult run_loop(ad::ParameterSet init, std::size_t n_train, const TrainConfig& tc, const char* stream,
                     const BatchLoss& batch_loss, const ValLoss& val_loss) {
  if (n_train == 0) throw std::invalid_argument("training: empty training set");
  if (tc.batch == 0) throw std::invalid_argument("training: batch must be positive");
  LoopState s{std::move(init), ad::Adam(ad::AdamConfig{tc.lr}), {}};
  if (tc.resume) load_state(tc, s);

  std::size_t ran = 0;
  for (std::size_t epoch = s.log.size() + 1; epoch <= tc.epochs; ++epoch) {
    if (tc.max_epochs_this_run && ran == tc.max_epochs_this_run) break;
    Rng rng(tc.seed, stream, epoch);
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());

    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n_train; start += tc.batch) {
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, start + tc.batch)));
      ad::Tape tape;
      ad::BoundParams bound(tape, s.params, true);
      Var loss = batch_loss(tape, bound, idx, rng);
      const double value = loss.value().item();
      if (!std::isfinite(value))
        throw TrainingDiverged(std::string(stream) + ": non-finite loss at epoch " + std::to_string(epoch) +
                               "; last good checkpoint kept");
      tape.backward(loss);
      try {
        s.adam.step(s.params, bound.gradients());
      } catch (const std::domain_error& e) {
        throw TrainingDiverged(std::string(stream) + ": " + e.what() + " at epoch " + std::to_string(epoch));
      }
      total += value;
      ++batches;
    }
    s.log.push_back({epoch, total / static_cast<double>(batches), val_loss(s.params)});
    save_state(tc, s);
    ++ran;
  }
  return {std::move(s.params), std::move(s.log)};
}

}  // namespace

TrainResult train_vae(const std::vector<Tensor>& train, const std::vector<Tensor>& val, const VaeConfig& config,
                      const TrainConfig& tc) {
  config.validate();
  const auto latent = config.latent_shape(1);
  BatchLoss loss = [&](ad::Tape& tape, const ad::BoundParams& p, const std::vector<std::size_t>& idx, Rng& rng) {
    Var x = tape.constant(stack(train, idx));
    Posterior post = encode(p, config, x);
    ad::Shape shape = latent;
    shape[0] = idx.size();
    Tensor eps(shape);
    rng.fill_normal(eps.storage());
    Var z = reparameterize(post.mu, post.sigma, eps);
    return vae_loss(x, decode(p, config, z), post.mu, post.logvar, tc.lambda_kl);
  };
  ValLoss vloss = [&](const ad::ParameterSet& params) {
    if (val.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t start = 0; start < val.size(); start += tc.batch) {
      std::vector<std::size_t> idx;
      for (std::size_t k = start; k < std::min(val.size(), start + tc.batch); ++k) idx.push_back(k);
      ad::Tape tape;
      ad::BoundParams p(tape, params, false);
      Var x = tape.constant(stack(val, idx));
      Posterior post = encode(p, config, x);
      total += vae_loss(x, decode(p, config, post.mu), post.mu, post.logvar, tc.lambda_kl).value().item() *
               static_cast<double>(idx.size());
    }
    return total / static_cast<double>(val.size());
  };
  return run_loop(init_vae(config, derive_seed(tc.seed, "vae.init")), train.size(), tc, "train.vae", loss, vloss);
}

std::vector<Tensor> encode_means(const ad::ParameterSet& vae, const VaeConfig& config, const std::vector<Tensor>& data) {
  std::vector<Tensor> out(data.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    ad::Tape tape;
    ad::BoundParams p(tape, vae, false);
    out[static_cast<std::size_t>(k)] = encode(p, config, tape.constant(data[static_cast<std::size_t>(k)])).mu.value();
  }
  return out;
}

double latent_scale_factor(const std::vector<Tensor>& latents) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& t : latents)
    for (double v : t.values()) {
      sum += v;
      sq += v * v;
      ++n;
    }
  if (n < 2) throw std::invalid_argument("latent_scale_factor: not enough latent values");
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  if (!(var > 0.0)) throw std::runtime_error("latent_scale_factor: latents have zero variance");
  return 1.0 / std::sqrt(var);
}

Var diffusion_loss(ad::Tape& tape, const NoisePredictor& predictor, const Tensor& z0, const NoiseSchedule& schedule,
                   Rng& rng) {
  if (z0.rank() < 2 || z0.dim(0) == 0) throw std::invalid_argument("diffusion_loss: empty batch");
  const std::size_t batch = z0.dim(0), per = z0.size() / batch;
  std::vector<std::size_t> t(batch);
  for (auto& v : t) v = 1 + rng.index(schedule.T);
  Tensor eps(z0.shape());
  rng.fill_normal(eps.storage());
  Tensor zt(z0.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    const double ab = schedule.alpha_bar_at(t[b]);
    const double a = std::sqrt(ab), s = std::sqrt(1.0 - ab);
    for (std::size_t k = b * per; k < (b + 1) * per; ++k) zt[k] = a * z0[k] + s * eps[k];
  }
  Var pred = predictor(tape.constant(zt), t);
  Var diff = ad::sub(pred, tape.constant(eps));
  return ad::scale(ad::sum(ad::square(diff)), 1.0 / static_cast<double>(batch));
}

TrainResult train_diffusion(const std::vector<Tensor>& train, const std::vector<Tensor>& val,
                            const DenoiserConfig& config, const NoiseSchedule& schedule, const TrainConfig& tc) {
  config.validate();
  BatchLoss loss = [&](ad::Tape& tape, const ad::BoundParams& p, const std::vector<std::size_t>& idx, Rng& rng) {
    return diffusion_loss(tape, network_predictor(p, config), stack(train, idx), schedule, rng);
  };
  ValLoss vloss = [&](const ad::ParameterSet& params) {
    if (val.empty()) return 0.0;
    // Fixed stream so validation losses are comparable across epochs.
    Rng rng(tc.seed, "train.diffusion.val");
    double total = 0.0;
    for (std::size_t start = 0; start < val.size(); start += tc.batch) {
      std::vector<std::size_t> idx;
      for (std::size_t k = start; k < std::min(val.size(), start + tc.batch); ++k) idx.push_back(k);
      ad::Tape tape;
      ad::BoundParams p(tape, params, false);
      total += diffusion_loss(tape, network_predictor(p, config), stack(val, idx), schedule, rng).value().item() *
               static_cast<double>(idx.size());
    }
    return total / static_cast<double>(val.size());
  };
  return run_loop(init_denoiser(config, derive_seed(tc.seed, "denoiser.init")), train.size(), tc, "train.diffusion",
                  loss, vloss);
}

}  // namespace lf::prior
