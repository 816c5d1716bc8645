#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "common/error.hpp"
#include "models/networks.hpp"
#include "models/serialize.hpp"

using namespace trustpcl;
using namespace trustpcl::models;

namespace {

Vec obs_of(std::initializer_list<double> v) {
  Vec o(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) o[i++] = x;
  return o;
}

Action cont(std::initializer_list<double> v) { return obs_of(v); }

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("gaussian: tiny std samples the mean") {
    Rng rng(1);
    GaussianPolicy pi(3, 2, {8});
    pi.initialize(rng);
    pi.log_std().setConstant(-20.0);
    const Vec o = obs_of({0.3, -0.2, 0.9});
    const Action a = pi.sample(o, rng);
    CHECK((a - pi.mean(o)).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(pi.greedy(o) == pi.mean(o));
  }

  TEST_CASE("gaussian: standard normal log-density at the mean") {
    GaussianPolicy pi(2, 1, {4});
    const Vec o = obs_of({1.0, 2.0});
    CHECK(pi.log_density(o, cont({0.0})) == doctest::Approx(-0.9189385332046727).epsilon(1e-12));
    CHECK(pi.log_density(o, cont({1.0})) == doctest::Approx(-1.4189385332046727).epsilon(1e-12));
    CHECK_THROWS_AS(pi.log_density(o, cont({0.0, 1.0})), ShapeError);
  }

  TEST_CASE("gaussian: density integrates to one") {
    Rng rng(2);
    GaussianPolicy pi(1, 1, {4});
    pi.initialize(rng);
    pi.log_std()[0] = std::log(0.7);
    const Vec o = obs_of({0.5});
    const double mu = pi.mean(o)[0];
    const double sigma = 0.7;
    const int n = 20000;
    const double lo = mu - 8 * sigma, hi = mu + 8 * sigma, h = (hi - lo) / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += std::exp(pi.log_density(o, cont({lo + (i + 0.5) * h}))) * h;
    CHECK(std::abs(total - 1.0) < 1e-4);
  }

  TEST_CASE("categorical: sampling frequency follows the softmax") {
    CategoricalPolicy pi(1, 2, {2});
    auto& out = pi.logit_net().layers().back();
    out.bias[0] = std::log(3.0);
    out.bias[1] = 0.0;
    Rng rng(3);
    const Vec o = obs_of({0.0});
    int zeros = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) zeros += action_index(pi.sample(o, rng)) == 0;
    CHECK(std::abs(zeros / static_cast<double>(n) - 0.75) < 0.01);
    CHECK(pi.probabilities(o)[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(pi.log_density(o, discrete_action(1)) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  }

  TEST_CASE("categorical: argmax and ties") {
    CategoricalPolicy pi(1, 3, {2});
    auto& out = pi.logit_net().layers().back();
    out.bias << 2.0, 5.0, 1.0;
    CHECK(action_index(pi.greedy(obs_of({0.0}))) == 1);
    CategoricalPolicy tie(1, 2, {2});
    tie.logit_net().layers().back().bias << 3.0, 3.0;
    CHECK(action_index(tie.greedy(obs_of({0.0}))) == 0);
    CHECK_THROWS(pi.log_density(obs_of({0.0}), discrete_action(3)));
  }

  TEST_CASE("uniform reference") {
    UniformPolicy u(2, 4);
    Rng rng(4);
    const Vec o = obs_of({0.1, 0.2});
    for (int k = 0; k < 4; ++k) CHECK(u.log_density(o, discrete_action(k)) == doctest::Approx(-std::log(4.0)));
    CHECK(u.num_params() == 0);
    for (int i = 0; i < 50; ++i) {
      const int a = action_index(u.sample(o, rng));
      CHECK((a >= 0 && a < 4));
    }
  }

  TEST_CASE("value net: zero weights and constant bias") {
    ValueNet v(3, {5});
    v.net().layers().back().bias[0] = 7.0;
    CHECK(v.value(obs_of({1.0, -2.0, 3.0})) == 7.0);
    CHECK(ValueNet::augment(obs_of({2.0, -3.0})) == obs_of({2.0, -3.0, 4.0, 9.0}));
  }

  TEST_CASE("log-density gradients match finite differences") {
    Rng rng(5);
    GaussianPolicy g(3, 2, {6});
    g.initialize(rng);
    g.log_std() << 0.2, -0.4;
    const Vec o = obs_of({0.4, -0.1, 0.7});
    const Action a = cont({0.3, -0.5});
    ParamVector grad;
    g.log_density_with_grad(o, a, grad);
    const ParamVector p = g.params();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      ParamVector pp = p, pm = p;
      pp[i] += 1e-6;
      pm[i] -= 1e-6;
      GaussianPolicy gp = g, gm = g;
      gp.set_params(pp);
      gm.set_params(pm);
      const double num = (gp.log_density(o, a) - gm.log_density(o, a)) / 2e-6;
      CHECK(std::abs(num - grad[i]) < 1e-6 * std::max(1.0, std::abs(num)));
    }
  }

  TEST_CASE("copying parameters reproduces outputs exactly") {
    Rng rng(6);
    GaussianPolicy a(4, 2, {8, 8});
    a.initialize(rng, -0.5);
    GaussianPolicy b(4, 2, {8, 8});
    b.set_params(a.params());
    ValueNet va(4, {8});
    va.initialize(rng);
    ValueNet vb(4, {8});
    vb.set_params(va.params());
    const Vec o = obs_of({0.1, 0.2, 0.3, 0.4});
    CHECK(a.mean(o) == b.mean(o));
    CHECK(va.value(o) == vb.value(o));
  }

  TEST_CASE("checkpoint round trip") {
    Rng rng(7);
    CategoricalPolicy pi(3, 4, {6});
    pi.initialize(rng);
    ValueNet v(3, {6});
    v.initialize(rng);
    const auto path = std::filesystem::temp_directory_path() / "trustpcl_models_ckpt.json";
    save_checkpoint(path.string(), pi, v);
    const Checkpoint c = load_checkpoint(path.string());
    CHECK(c.policy->kind() == "categorical");
    CHECK(c.policy->params() == pi.params());
    CHECK(c.value->params() == v.params());
    std::filesystem::remove(path);

    auto j = policy_to_json(pi);
    j["params"].erase(0);
    CHECK_THROWS(policy_from_json(j));
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/ckpt.json"), IoError);
  }
}
