#include "latentflow/inversion/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "latentflow/ad/ops.hpp"
#include "latentflow/common/rng.hpp"
#include "latentflow/prior/sampler.hpp"

namespace lf::inversion {

using ad::Tensor;
using ad::Var;

std::string to_string(PriorMode mode) {
  switch (mode) {
    case PriorMode::LatentDiffusion: return "latent-diffusion";
    case PriorMode::VaeOnly: return "vae-only";
    case PriorMode::PixelSpace: return "pixel-space";
  }
  return "?";
}

PriorMode parse_prior_mode(const std::string& text) {
  if (text == "latent-diffusion") return PriorMode::LatentDiffusion;
  if (text == "vae-only") return PriorMode::VaeOnly;
  if (text == "pixel-space") return PriorMode::PixelSpace;
  throw std::invalid_argument("unknown prior mode '" + text + "' (latent-diffusion, vae-only, pixel-space)");
}

void InversionConfig::validate() const {
  if (!(beta >= 0.0)) throw std::invalid_argument("inversion: beta must be >= 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("inversion: eta must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("inversion: max_iter must be >= 1");
  if (!(k_obs_weight >= 0.0) || !(smoothing >= 0.0)) throw std::invalid_argument("inversion: weights must be >= 0");
}

double latent_regularizer(const Tensor& z) {
  double s = 0.0;
  for (double v : z.values()) s += v * v;
  return 0.5 * s;
}

double conductivity_misfit(const fvm::ScalarField2D& K_fvm, const ObservationSet& obs, double w, double floor) {
  if (w == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& o : obs.conductivity) {
    const double d = std::log(K_fvm(o.i, o.j)) - std::log(o.value + floor);
    s += d * d;
  }
  return w * s;
}

fvm::ScalarField2D conductivity_cotangent(const adjoint::DifferentiableDarcy& darcy, const fvm::ScalarField2D& K_fvm,
                                          const ObservationSet& obs, double w, double floor) {
  auto g = darcy.vjp(K_fvm, misfit_gradient(darcy.head(), obs));
  if (w != 0.0)
    for (const auto& o : obs.conductivity) {
      const double k = K_fvm(o.i, o.j);
      g(o.i, o.j) += 2.0 * w * (std::log(k) - std::log(o.value + floor)) / k;
    }
  return g;
}

// ---------------------------------------------------------------------------------------------

struct LatentObjective::Cache {
  Tensor z;
  ad::Tape tape;
  std::optional<ad::BoundParams> vae, den;
  Var z_var, u_var, k_var, reg_var;
  adjoint::DifferentiableDarcy darcy;
  bool fresh = false;
};

LatentObjective::LatentObjective(const prior::LatentPrior& prior, ObservationSet obs, InversionConfig config)
    : prior_(prior), obs_(std::move(obs)), config_(config) {
  config_.validate();
  obs_.validate(config_.grid.nx, config_.grid.ny);
  if (config_.mode == PriorMode::PixelSpace) throw std::invalid_argument("LatentObjective: pixel-space mode");
  if (config_.mode == PriorMode::LatentDiffusion && !prior_.has_denoiser)
    throw std::invalid_argument("LatentObjective: latent-diffusion mode needs a denoiser checkpoint");
  if (prior_.vae_config.resolution != config_.grid.nx || prior_.vae_config.resolution != config_.grid.ny)
    throw std::invalid_argument("LatentObjective: prior resolution " + std::to_string(prior_.vae_config.resolution) +
                                " does not match the inversion grid");
}

LatentObjective::~LatentObjective() = default;

Evaluation LatentObjective::evaluate(const Tensor& z) {
  if (z.shape() != prior_.latent_shape())
    throw std::invalid_argument("LatentObjective: latent " + ad::shape_str(z.shape()) + " expected " +
                                ad::shape_str(prior_.latent_shape()));
  cache_.reset();
  auto c = std::make_unique<Cache>();
  c->darcy = adjoint::DifferentiableDarcy(config_.bc);
  c->z = z;
  c->z_var = c->tape.leaf(z, true);
  c->vae.emplace(c->tape, prior_.vae, false);
  Var z0 = c->z_var;
  if (config_.mode == PriorMode::LatentDiffusion) {
    c->den.emplace(c->tape, prior_.denoiser, false);
    z0 = prior::ddim_chain(prior::network_predictor(*c->den, prior_.denoiser_config), c->z_var, prior_.schedule,
                           config_.ddim_steps);
  }
  c->u_var = prior::decode_scaled(*c->vae, prior_.vae_config, z0, prior_.latent_scale);
  c->k_var = prior_.codec.solver_conductivity(c->u_var);
  c->reg_var = ad::scale(ad::sum(ad::square(c->z_var)), 0.5 * config_.beta);

  Evaluation e;
  e.K_fvm = config_.grid.field().with_values(c->k_var.value().storage());
  e.h = c->darcy.forward(e.K_fvm);
  e.misfit = data_misfit(e.h, obs_);
  e.k_misfit = conductivity_misfit(e.K_fvm, obs_, config_.k_obs_weight, prior_.codec.stats().floor);
  e.regularizer = c->reg_var.value().item();
  e.total = e.misfit + e.k_misfit + e.regularizer;
  c->fresh = true;
  cache_ = std::move(c);
  return e;
}

Tensor LatentObjective::gradient(const Tensor& z) {
  if (!cache_ || !cache_->fresh) throw std::logic_error("LatentObjective::gradient: no cached forward state");
  if (!(cache_->z == z)) throw std::logic_error("LatentObjective::gradient: cached forward state is stale for this z");
  auto& c = *cache_;
  const auto gK = conductivity_cotangent(c.darcy, c.darcy.conductivity(), obs_, config_.k_obs_weight,
                                         prior_.codec.stats().floor);
  Tensor gk_t(c.k_var.shape(), gK.storage());
  // Surrogate whose gradient is (dK/dz)^T dJ/dK + beta z.
  Var surrogate = ad::add(ad::dot(c.k_var, gk_t), c.reg_var);
  c.tape.backward(surrogate);
  c.fresh = false;  // the tape now holds gradients; a second call would double-count
  return c.tape.grad(c.z_var);
}

Tensor LatentObjective::initial_point() const {
  Tensor z(prior_.latent_shape());
  Rng rng(config_.seed, "inversion.init");
  rng.fill_normal(z.storage());
  return z;
}

fvm::ScalarField2D LatentObjective::reported(const fvm::ScalarField2D& K_fvm) const {
  return prior_.codec.reported_conductivity(K_fvm);
}

const Tensor& LatentObjective::last_unit() const {
  if (!cache_) throw std::logic_error("LatentObjective: nothing evaluated yet");
  return cache_->u_var.value();
}

// ---------------------------------------------------------------------------------------------

PixelObjective::PixelObjective(const prior::FieldCodec& codec, ObservationSet obs, InversionConfig config)
    : codec_(codec), obs_(std::move(obs)), config_(config), darcy_(config.bc) {
  config_.validate();
  obs_.validate(config_.grid.nx, config_.grid.ny);
}

namespace {
double smoothing_term(const Tensor& u, std::size_t nx, std::size_t ny, double w, Tensor* grad) {
  if (w == 0.0) return 0.0;
  double s = 0.0;
  auto face = [&](std::size_t p, std::size_t q) {
    const double d = u[p] - u[q];
    s += d * d;
    if (grad) {
      (*grad)[p] += 2.0 * w * d;
      (*grad)[q] -= 2.0 * w * d;
    }
  };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t p = j * nx + i;
      if (i + 1 < nx) face(p, p + 1);
      if (j + 1 < ny) face(p, p + nx);
    }
  return w * s;
}
}  // namespace

Evaluation PixelObjective::evaluate(const Tensor& u) {
  if (u.size() != config_.grid.nx * config_.grid.ny) throw std::invalid_argument("PixelObjective: size mismatch");
  cached_u_.reset();
  Evaluation e;
  e.K_fvm = codec_.solver_conductivity(u, config_.grid);
  e.h = darcy_.forward(e.K_fvm);
  e.misfit = data_misfit(e.h, obs_);
  e.k_misfit = conductivity_misfit(e.K_fvm, obs_, config_.k_obs_weight, codec_.stats().floor);
  e.regularizer = smoothing_term(u, config_.grid.nx, config_.grid.ny, config_.smoothing, nullptr);
  e.total = e.misfit + e.k_misfit + e.regularizer;
  cached_u_ = u;
  cached_K_ = e.K_fvm;
  return e;
}

Tensor PixelObjective::gradient(const Tensor& u) {
  if (!cached_u_) throw std::logic_error("PixelObjective::gradient: no cached forward state");
  if (!(*cached_u_ == u)) throw std::logic_error("PixelObjective::gradient: cached forward state is stale");
  const auto gK = conductivity_cotangent(darcy_, cached_K_, obs_, config_.k_obs_weight, codec_.stats().floor);
  Tensor g(u.shape());
  for (std::size_t p = 0; p < g.size(); ++p) g[p] = gK[p] * cached_K_[p] * codec_.half_range();
  smoothing_term(u, config_.grid.nx, config_.grid.ny, config_.smoothing, &g);
  return g;
}

Tensor PixelObjective::initial_point() const { return Tensor({1, 1, config_.grid.ny, config_.grid.nx}, 0.0); }

fvm::ScalarField2D PixelObjective::reported(const fvm::ScalarField2D& K_fvm) const {
  return codec_.reported_conductivity(K_fvm);
}

}  // namespace lf::inversion
