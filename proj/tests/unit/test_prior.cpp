#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "latentflow/ad/ops.hpp"
#include "latentflow/prior/codec.hpp"
#include "latentflow/prior/latent_prior.hpp"
#include "latentflow/prior/sampler.hpp"
#include "latentflow/prior/schedule.hpp"
#include "latentflow/prior/training.hpp"
#include "latentflow/prior/vae.hpp"
#include "latentflow/synth/gaussian.hpp"
#include "support.hpp"

using namespace lf;
using namespace lf::prior;
using ad::Tensor;
using ad::Var;
using test::random_tensor;
namespace fs = std::filesystem;

namespace {

VaeConfig tiny_vae() {
  VaeConfig c;
  c.resolution = 8;
  c.channels = {4};
  c.latent_channels = 2;
  return c;  // latent 2 x 4 x 4
}

DenoiserConfig tiny_denoiser() {
  DenoiserConfig c;
  c.latent_channels = 2;
  c.latent_size = 4;
  c.base_channels = 4;
  c.time_dim = 8;
  return c;
}

std::vector<Tensor> gaussian_batch(std::size_t n, std::size_t res, const FieldCodec& codec, std::uint64_t seed0) {
  std::vector<Tensor> out;
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(codec.encode_field(synth::gaussian_field({0.3, fvm::GridSpec{res, res}, seed0 + k})));
  return out;
}

FieldCodec gaussian_codec() { return FieldCodec(synth::LogStats{0.01, std::log(0.01), std::log(1.01)}); }

}  // namespace

TEST_CASE("linear schedule") {
  const auto s = make_schedule(1000);
  CHECK(s.beta_at(1) == 1e-4);
  CHECK(s.beta_at(1000) == doctest::Approx(2e-2).epsilon(1e-15));
  CHECK(s.alpha_bar_at(0) == 1.0);
  for (std::size_t t = 1; t <= 1000; ++t) {
    CHECK(s.alpha_bar_at(t) < s.alpha_bar_at(t - 1));
    CHECK(s.alpha_bar_at(t) == s.alpha_bar_at(t - 1) * s.alpha_at(t));
    CHECK(s.alpha_at(t) == 1.0 - s.beta_at(t));
  }
  CHECK(s.alpha_bar_at(1000) < 0.01);
  for (std::size_t T : {1, 2, 7, 50}) {
    const auto q = make_schedule(T);
    for (std::size_t t = 1; t <= T; ++t) CHECK(q.alpha_bar_at(t) < q.alpha_bar_at(t - 1));
  }
  CHECK_THROWS(make_schedule(0));
  CHECK_THROWS(s.beta_at(1001));
}

TEST_CASE("forward diffusion special cases") {
  const auto s = make_schedule(1000);
  const auto z0 = random_tensor({1, 2, 4, 4}, 1), eps = random_tensor({1, 2, 4, 4}, 2);
  const Tensor zero({1, 2, 4, 4}, 0.0);
  const auto a = forward_diffuse(z0, 300, zero, s);
  const auto b = forward_diffuse(zero, 300, eps, s);
  for (std::size_t k = 0; k < z0.size(); ++k) {
    CHECK(a[k] == std::sqrt(s.alpha_bar_at(300)) * z0[k]);
    CHECK(b[k] == std::sqrt(1 - s.alpha_bar_at(300)) * eps[k]);
  }
  CHECK_THROWS(forward_diffuse(z0, 0, eps, s));
  CHECK_THROWS(forward_diffuse(z0, 1001, eps, s));
}

TEST_CASE("single-step transitions telescope to the marginal mean") {
  const auto s = make_schedule(1000);
  const auto z0 = random_tensor({8}, 3);
  const Tensor zero({8}, 0.0);
  Tensor z = z0;
  for (std::size_t t = 1; t <= 400; ++t) z = diffuse_one_step(z, t, zero, s);
  for (std::size_t k = 0; k < 8; ++k) CHECK(z[k] == doctest::Approx(std::sqrt(s.alpha_bar_at(400)) * z0[k]).epsilon(1e-12));
}

TEST_CASE("Markov chain and closed-form marginal agree statistically") {
  const auto s = make_schedule(1000);
  const std::size_t t = 60, n = 10000;
  const double z0 = 0.7, mean = std::sqrt(s.alpha_bar_at(t)) * z0, var = 1 - s.alpha_bar_at(t);
  Rng rng(11);
  double m1 = 0, v1 = 0, m2 = 0, v2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = forward_diffuse(Tensor({1}, z0), t, Tensor({1}, rng.normal()), s)[0];
    Tensor z({1}, z0);
    for (std::size_t u = 1; u <= t; ++u) z = diffuse_one_step(z, u, Tensor({1}, rng.normal()), s);
    m1 += a;
    v1 += a * a;
    m2 += z[0];
    v2 += z[0] * z[0];
  }
  const double N = static_cast<double>(n);
  m1 /= N;
  m2 /= N;
  v1 = v1 / N - m1 * m1;
  v2 = v2 / N - m2 * m2;
  const double se_mean = std::sqrt(var / N), se_var = var * std::sqrt(2.0 / (N - 1));
  CHECK(std::abs(m1 - mean) < 3 * se_mean);
  CHECK(std::abs(m2 - mean) < 3 * se_mean);
  CHECK(std::abs(v1 - var) < 3 * se_var);
  CHECK(std::abs(v2 - var) < 3 * se_var);
}

TEST_CASE("DDIM with the true noise recovers z0") {
  const auto s = make_schedule(1000);
  const auto z0 = random_tensor({1, 4, 4, 4}, 4), eps = random_tensor({1, 4, 4, 4}, 5);
  for (std::size_t t : {1, 20, 500, 1000}) {
    const auto zt = forward_diffuse(z0, t, eps, s);
    const auto back = ddim_step(zt, t, 0, eps, s);
    for (std::size_t k = 0; k < z0.size(); ++k) CHECK(std::abs(back[k] - z0[k]) < 1e-12);
    // Strided step lands on the marginal of the earlier time with the same noise.
    if (t > 10) {
      const auto mid = ddim_step(zt, t, t / 2, eps, s);
      const auto expect = forward_diffuse(z0, t / 2, eps, s);
      for (std::size_t k = 0; k < z0.size(); ++k) CHECK(std::abs(mid[k] - expect[k]) < 1e-12);
    }
  }
  const auto once = ddim_step(forward_diffuse(z0, 77, eps, s), 77, 30, eps, s);
  CHECK(once == ddim_step(forward_diffuse(z0, 77, eps, s), 77, 30, eps, s));
  CHECK_THROWS(ddim_step(z0, 10, 10, eps, s));
  CHECK_THROWS(ddim_step(z0, 10, 11, eps, s));

  const auto taus = ddim_timesteps(1000, 20);
  REQUIRE(taus.size() == 21);
  CHECK(taus.front() == 1000);
  CHECK(taus.back() == 0);
  for (std::size_t k = 1; k < taus.size(); ++k) CHECK(taus[k] < taus[k - 1]);
  CHECK_THROWS(ddim_timesteps(10, 11));
}

TEST_CASE("VAE shapes and head initialization") {
  VaeConfig c;  // 32 x 32, three stride-2 levels
  CHECK(c.latent_shape(2) == ad::Shape{2, 4, 4, 4});
  VaeConfig big;
  big.resolution = 96;
  CHECK(big.latent_size() == 12);
  VaeConfig odd;
  odd.resolution = 20;
  CHECK_THROWS(odd.validate());

  auto params = init_vae(c, 1);
  for (const char* n : {kMuHeadWeight, kMuHeadBias, kLogvarHeadWeight, kLogvarHeadBias}) params.at(n).fill(0.0);
  ad::Tape tape;
  ad::BoundParams p(tape, params, false);
  const auto post = encode(p, c, tape.constant(random_tensor({3, 1, 32, 32}, 2)));
  CHECK(post.mu.shape() == c.latent_shape(3));
  for (double v : post.mu.value().values()) CHECK(v == 0.0);
  for (double v : post.sigma.value().values()) CHECK(v == 1.0);

  const auto trained_like = init_vae(c, 3);
  ad::Tape t2;
  ad::BoundParams q(t2, trained_like, false);
  const auto post2 = encode(q, c, t2.constant(random_tensor({2, 1, 32, 32}, 4, 5.0)));
  for (double v : post2.sigma.value().values()) CHECK(v > 0.0);
  CHECK(decode(q, c, post2.mu).shape() == ad::Shape{2, 1, 32, 32});
  CHECK_THROWS(encode(q, c, t2.constant(Tensor({1, 1, 16, 16}))));
  CHECK_THROWS(decode(q, c, t2.constant(Tensor({1, 4, 2, 2}))));
}

TEST_CASE("reparameterization") {
  ad::Tape tape;
  auto mu = tape.leaf(random_tensor({1, 2, 2, 2}, 1));
  auto sigma = tape.leaf(Tensor({1, 2, 2, 2}, 0.5));
  const auto eps = random_tensor({1, 2, 2, 2}, 2);
  const Tensor no_noise = reparameterize(mu, sigma, Tensor({1, 2, 2, 2}, 0.0)).value();
  const Tensor no_spread = reparameterize(mu, tape.leaf(Tensor({1, 2, 2, 2}, 0.0)), eps).value();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    CHECK(no_noise[k] == mu.value()[k]);
    CHECK(no_spread[k] == mu.value()[k]);
  }
  tape.backward(ad::sum(reparameterize(mu, sigma, eps)));
  CHECK(tape.grad(sigma) == eps);
  for (double g : tape.grad(mu).values()) CHECK(g == 1.0);
}

TEST_CASE("VAE loss") {
  ad::Tape tape;
  const auto x = random_tensor({2, 1, 8, 8}, 1);
  auto zero = tape.constant(Tensor({2, 2, 4, 4}, 0.0));
  CHECK(vae_loss(tape.constant(x), tape.constant(x), zero, zero, 1e-4).value().item() == 0.0);
  CHECK(gaussian_kl(tape.constant(Tensor({1}, 1.0)), tape.constant(Tensor({1}, 0.0))).value().item() == 0.5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double l = vae_loss(tape.constant(x), tape.constant(random_tensor({2, 1, 8, 8}, seed)),
                              tape.constant(random_tensor({2, 2, 4, 4}, seed + 50)),
                              tape.constant(random_tensor({2, 2, 4, 4}, seed + 90)), 1e-2)
                         .value()
                         .item();
    CHECK(l >= 0.0);
  }
}

TEST_CASE("decoder is deterministic and differentiable") {
  const auto c = tiny_vae();
  const auto params = init_vae(c, 7);
  const auto z = random_tensor(c.latent_shape(1), 8);
  const auto w = random_tensor({1, 1, 8, 8}, 9);
  auto f = [&](const std::vector<double>& zv) {
    ad::Tape tape;
    ad::BoundParams p(tape, params, false);
    return ad::dot(decode(p, c, tape.constant(Tensor(z.shape(), zv))), w).value().item();
  };
  ad::Tape tape;
  ad::BoundParams p(tape, params, false);
  auto zv = tape.leaf(z);
  auto y = decode(p, c, zv);
  {
    ad::Tape again;
    ad::BoundParams pa(again, params, false);
    CHECK(decode(pa, c, again.constant(z)).value() == y.value());
  }
  tape.backward(ad::dot(y, w));
  const auto fd = test::central_difference(f, z.storage(), 1e-6);
  CHECK(test::max_rel_err(tape.grad(zv).storage(), fd, 1e-6) < 1e-4);
  // frozen parameters receive no gradient
  for (const auto& [name, g] : p.gradients())
    for (double v : g.values()) CHECK(v == 0.0);
}

TEST_CASE("denoiser shapes and gradient") {
  const auto c = tiny_denoiser();
  const auto params = init_denoiser(c, 3);
  CHECK(timestep_embedding({0, 5, 999}, 8).shape() == ad::Shape{3, 8});
  const auto z = random_tensor({2, 2, 4, 4}, 4);
  const auto w = random_tensor({2, 2, 4, 4}, 5);
  const std::vector<std::size_t> t{10, 700};
  auto f = [&](const std::vector<double>& zv) {
    ad::Tape tape;
    ad::BoundParams p(tape, params, false);
    return ad::dot(predict_noise(p, c, tape.constant(Tensor(z.shape(), zv)), t), w).value().item();
  };
  ad::Tape tape;
  ad::BoundParams p(tape, params, false);
  auto zv = tape.leaf(z);
  auto y = predict_noise(p, c, zv, t);
  CHECK(y.shape() == z.shape());
  tape.backward(ad::dot(y, w));
  CHECK(test::max_rel_err(tape.grad(zv).storage(), test::central_difference(f, z.storage(), 1e-6), 1e-6) < 1e-4);

  DenoiserConfig bad = c;
  bad.latent_size = 6;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("sampling chain is deterministic and differentiable in z_T") {
  const auto vc = tiny_vae();
  const auto dc = tiny_denoiser();
  const auto vae = init_vae(vc, 1);
  const auto den = init_denoiser(dc, 2);
  const auto sched = make_schedule(1000);
  const auto zT = random_tensor(vc.latent_shape(1), 3);
  const auto w = random_tensor({1, 1, 8, 8}, 4);
  auto run = [&](ad::Tape& tape, Var z) {
    ad::BoundParams pv(tape, vae, false), pd(tape, den, false);
    return decode_scaled(pv, vc, ddim_chain(network_predictor(pd, dc), z, sched, 5), 1.3);
  };
  auto f = [&](const std::vector<double>& zv) {
    ad::Tape tape;
    return ad::dot(run(tape, tape.constant(Tensor(zT.shape(), zv))), w).value().item();
  };
  ad::Tape tape;
  auto z = tape.leaf(zT);
  auto y = run(tape, z);
  {
    ad::Tape again;
    CHECK(run(again, again.constant(zT)).value() == y.value());
  }
  tape.backward(ad::dot(y, w));
  CHECK(test::max_rel_err(tape.grad(z).storage(), test::central_difference(f, zT.storage(), 1e-6), 1e-6) < 1e-4);
}

TEST_CASE("diffusion loss") {
  const auto sched = make_schedule(1000);
  const std::size_t B = 2000;
  Tensor z0({B, 2, 4, 4});
  Rng data(1);
  for (double& v : z0.values()) v = data.normal();

  SUBCASE("oracle denoiser") {
    // Recovers the injected noise from z_t because z0 is known.
    ad::Tape tape;
    NoisePredictor oracle = [&](Var zt, const std::vector<std::size_t>& t) {
      Tensor eps(zt.shape());
      const std::size_t per = zt.size() / t.size();
      for (std::size_t b = 0; b < t.size(); ++b) {
        const double ab = sched.alpha_bar_at(t[b]);
        for (std::size_t k = 0; k < per; ++k) {
          const std::size_t i = b * per + k;
          eps[i] = (zt.value()[i] - std::sqrt(ab) * z0[i]) / std::sqrt(1 - ab);
        }
      }
      return zt.tape().constant(eps);
    };
    Rng rng(2);
    CHECK(diffusion_loss(tape, oracle, z0, sched, rng).value().item() < 1e-18);
  }
  SUBCASE("zero denoiser gives the latent dimension") {
    ad::Tape tape;
    NoisePredictor zero = [](Var zt, const std::vector<std::size_t>&) { return zt.tape().constant(Tensor(zt.shape())); };
    Rng rng(3);
    const double loss = diffusion_loss(tape, zero, z0, sched, rng).value().item();
    const double d = 32.0;
    CHECK(loss >= 0.0);
    CHECK(std::abs(loss - d) < 4.0 * std::sqrt(2 * d / static_cast<double>(B)));
  }
}

TEST_CASE("codec round trip") {
  const auto codec = gaussian_codec();
  CHECK(codec.to_unit(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(codec.to_unit(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const fvm::GridSpec g{8, 8};
  const auto K = synth::gaussian_field({0.3, g, 4});
  const auto Kf = codec.solver_conductivity(codec.encode_field(K), g);
  const auto back = codec.reported_conductivity(Kf);
  for (std::size_t p = 0; p < K.size(); ++p) {
    CHECK(Kf[p] == doctest::Approx(K[p] + 0.01).epsilon(1e-12));
    CHECK(std::abs(back[p] - K[p]) < 1e-12);
  }
}

TEST_CASE("training: loss decreases, resume is bitwise, frozen VAE untouched") {
  const auto codec = gaussian_codec();
  VaeConfig vc;
  vc.resolution = 16;
  vc.channels = {8, 16};
  const auto train = gaussian_batch(48, 16, codec, 100), val = gaussian_batch(8, 16, codec, 500);
  TrainConfig tc;
  tc.epochs = 5;
  tc.batch = 8;
  tc.seed = 9;
  const auto res = train_vae(train, val, vc, tc);
  REQUIRE(res.log.size() == 5);
  for (std::size_t e = 1; e < 5; ++e) CHECK(res.log[e].train_loss < res.log[e - 1].train_loss);

  const auto dir = fs::temp_directory_path() / "lf_prior_resume";
  fs::remove_all(dir);
  tc.epochs = 4;
  tc.checkpoint_dir = dir;
  tc.name = "vae";
  tc.max_epochs_this_run = 2;
  const auto half = train_vae(train, val, vc, tc);
  CHECK(half.log.size() == 2);
  tc.resume = true;
  tc.max_epochs_this_run = 0;
  const auto resumed = train_vae(train, val, vc, tc);
  TrainConfig straight = tc;
  straight.checkpoint_dir.clear();
  straight.resume = false;
  const auto full = train_vae(train, val, vc, straight);
  CHECK(resumed.params.checksum() == full.params.checksum());
  REQUIRE(resumed.log.size() == 4);
  for (std::size_t e = 0; e < 4; ++e) CHECK(resumed.log[e].train_loss == full.log[e].train_loss);
  CHECK(fs::exists(dir / "vae_log.csv"));

  const auto before = full.params.checksum();
  const auto latents = encode_means(full.params, vc, train);
  const double scale = latent_scale_factor(latents);
  CHECK(scale > 0.0);
  std::vector<Tensor> z = latents;
  for (auto& t : z)
    for (double& v : t.values()) v *= scale;
  DenoiserConfig dc;
  dc.latent_channels = vc.latent_channels;
  dc.latent_size = vc.latent_size();
  dc.base_channels = 8;
  TrainConfig dtc;
  dtc.epochs = 2;
  dtc.batch = 16;
  const auto den = train_diffusion(z, std::vector<Tensor>(z.begin(), z.begin() + 8), dc, make_schedule(1000), dtc);
  CHECK(den.log.size() == 2);
  CHECK(full.params.checksum() == before);

  auto poisoned = train;
  poisoned[3][0] = NAN;
  TrainConfig bad;
  bad.epochs = 1;
  bad.batch = 8;
  CHECK_THROWS_AS(train_vae(poisoned, val, vc, bad), TrainingDiverged);
  fs::remove_all(dir);
}

TEST_CASE("prior checkpoints round-trip") {
  LatentPrior p;
  p.codec = gaussian_codec();
  p.vae_config = tiny_vae();
  p.vae = init_vae(p.vae_config, 1);
  p.latent_scale = 1.7;
  const auto dir = fs::temp_directory_path() / "lf_prior_ckpt";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_vae(dir / kVaeFile, p);
  CHECK_THROWS(load_prior(dir, true));
  auto q = load_prior(dir, false);
  CHECK_FALSE(q.has_denoiser);
  CHECK(q.vae.checksum() == p.vae.checksum());
  CHECK(q.latent_scale == 1.7);
  CHECK(q.codec.stats().log_min == p.codec.stats().log_min);
  CHECK(q.vae_config.channels == p.vae_config.channels);

  p.denoiser_config = tiny_denoiser();
  p.denoiser = init_denoiser(p.denoiser_config, 2);
  p.schedule_config = {200, 1e-4, 3e-2};
  p.schedule = make_schedule(200, 1e-4, 3e-2);
  p.has_denoiser = true;
  save_prior(dir, p);
  const auto r = load_prior(dir, true);
  CHECK(r.denoiser.checksum() == p.denoiser.checksum());
  CHECK(r.schedule.T == 200);
  CHECK(r.schedule.beta == p.schedule.beta);
  CHECK(r.denoiser_config.base_channels == 4);
  fs::remove_all(dir);
}
