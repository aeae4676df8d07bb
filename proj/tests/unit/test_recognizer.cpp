#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "invizo/core/error.hpp"
#include "invizo/imaging/image_io.hpp"
#include "invizo/recognizer/checkpoint.hpp"
#include "invizo/recognizer/layers.hpp"
#include "invizo/recognizer/optimizer.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"

using namespace invizo;
using namespace invizo::nn;

namespace {

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0, scale);
  Tensor t(std::move(shape));
  for (double& v : t.data) v = n(rng);
  return t;
}

// Scalar sum(x * r) for a fixed random r, so every output element matters.
Var weighted_sum(const Var& x, const Tensor& r) {
  double s = 0;
  for (std::size_t i = 0; i < r.size(); ++i) s += x->value[i] * r[i];
  return make_node(Tensor({1}, {s}), {x}, [r](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < r.size(); ++i) g[i] += self.grad[0] * r[i];
  });
}

// Max relative error between backprop and central differences over every
// entry of every input.
double op_gradient_error(const std::function<Var(const std::vector<Var>&)>& f, std::vector<Tensor> inputs,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Var> vars;
  for (auto& t : inputs) vars.push_back(parameter(t));
  const Var out = f(vars);
  const Tensor r = random_tensor(out->value.shape, rng);
  backward(weighted_sum(out, r));
  double worst = 0;
  for (auto& v : vars) {
    for (std::size_t i = 0; i < v->value.size(); ++i) {
      const double orig = v->value[i];
      const auto eval = [&] {
        NoGradGuard g;
        const Var o = f(vars);
        double s = 0;
        for (std::size_t j = 0; j < r.size(); ++j) s += o->value[j] * r[j];
        return s;
      };
      v->value[i] = orig + 1e-6;
      const double up = eval();
      v->value[i] = orig - 1e-6;
      const double down = eval();
      v->value[i] = orig;
      const double numeric = (up - down) / 2e-6;
      const double analytic = v->grad.size() ? v->grad[i] : 0.0;
      worst = std::max(worst, std::abs(analytic - numeric) / std::max(1e-4, std::abs(analytic) + std::abs(numeric)));
    }
  }
  return worst;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.d_model = 8;
  c.enc_layers = 1;
  c.dec_layers = 1;
  c.heads = 2;
  c.ff_dim = 16;
  c.dropout = 0.0;
  c.input_w = 48;
  c.input_h = 16;
  c.input_channels = 1;
  c.conv_channels = {2, 3, 2};
  c.max_len = 16;
  c.seed = 5;
  return c;
}

RasterImage random_image(int w, int h, std::mt19937_64& rng) {
  RasterImage img(w, h, 1);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

}  // namespace

TEST_CASE("op gradients match central differences") {
  std::mt19937_64 rng(1);
  const auto err = [&](auto f, std::vector<std::vector<int>> shapes) {
    std::vector<Tensor> in;
    for (auto& s : shapes) in.push_back(random_tensor(s, rng));
    return op_gradient_error(f, in, rng());
  };
  CHECK(err([](const auto& v) { return linear(v[0], v[1], v[2]); }, {{2, 3, 4}, {4, 5}, {5}}) < 1e-6);
  CHECK(err([](const auto& v) { return layer_norm(v[0], v[1], v[2]); }, {{3, 6}, {6}, {6}}) < 1e-5);
  CHECK(err([](const auto& v) { return attention(v[0], v[1], v[2], 2, false); }, {{2, 3, 4}, {2, 5, 4}, {2, 5, 4}}) < 1e-5);
  CHECK(err([](const auto& v) { return attention(v[0], v[1], v[2], 2, true); }, {{1, 4, 4}, {1, 4, 4}, {1, 4, 4}}) < 1e-5);
  CHECK(err([](const auto& v) { return conv2d_3x3(v[0], v[1], v[2]); }, {{2, 2, 5, 4}, {3, 2, 3, 3}, {3}}) < 1e-6);
  CHECK(err([](const auto& v) { return columns_to_sequence(v[0]); }, {{2, 3, 2, 4}}) < 1e-7);
  CHECK(err([](const auto& v) { return max_pool2x2(v[0]); }, {{1, 2, 4, 6}}) < 1e-6);
  CHECK(err([](const auto& v) { return relu(add(v[0], scale(v[1], 0.5))); }, {{4, 5}, {4, 5}}) < 1e-6);
  Tensor rm({3}, 0.0), rv({3}, 1.0);
  CHECK(err([&](const auto& v) { return batch_norm2d(v[0], v[1], v[2], rm, rv, true); }, {{4, 3, 2, 2}, {3}, {3}}) < 1e-5);
  const std::vector<int> tokens = {1, 4, 0, 2, 3, 3};
  CHECK(err([&](const auto& v) { return embedding(tokens, 2, 3, v[0]); }, {{5, 4}}) < 1e-7);
  const std::vector<int> targets = {1, 0, 4, 2, 3, 0};
  CHECK(err([&](const auto& v) { return cross_entropy(v[0], targets, 0); }, {{2, 3, 5}}) < 1e-6);
}

TEST_CASE("cross entropy ignores padding and is zero when all ignored") {
  std::mt19937_64 rng(2);
  const Var logits = parameter(random_tensor({1, 2, 3}, rng));
  const double full = cross_entropy(logits, {1, 2}, 0)->value[0];
  const double one = cross_entropy(logits, {1, 0}, 0)->value[0];
  double z = 0;
  for (int k = 0; k < 3; ++k) z += std::exp(logits->value[k]);
  CHECK(one == doctest::Approx(std::log(z) - logits->value[1]));
  CHECK(full != doctest::Approx(one));
  CHECK(cross_entropy(logits, {0, 0}, 0)->value[0] == 0.0);
}

TEST_CASE("positional encoding formula") {
  const Tensor pe = sinusoidal_pe(50, 16);
  for (int pos : {0, 1, 17, 49})
    for (int i = 0; i < 8; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * i / 16);
      CHECK(std::abs(pe[pos * 16 + 2 * i] - std::sin(angle)) < 1e-12);
      CHECK(std::abs(pe[pos * 16 + 2 * i + 1] - std::cos(angle)) < 1e-12);
    }
  CHECK_THROWS_AS(sinusoidal_pe(4, 7), Error);
}

TEST_CASE("model gradients at a tiny configuration") {
  std::mt19937_64 rng(3);
  const Vocabulary vocab(U"٠١٢٣");
  Recognizer model(tiny_config(), vocab.size());
  for (auto& [name, buf] : model.buffers())
    for (double& v : buf->data) v = name.ends_with("var") ? 1.5 : 0.1;
  std::vector<TrainingSample> samples = {{random_image(48, 16, rng), "٠١٢"}, {random_image(40, 14, rng), "٣"}};
  const Batch batch = make_batch(samples, vocab, model.config());
  CHECK(batch.steps == 4);
  for (const auto& g : testing::gradient_check(model, batch, 12, 1e-6, 4)) {
    CAPTURE(g.name);
    CHECK(g.relative < 1e-3);
  }
}

TEST_CASE("decoder is causal") {
  std::mt19937_64 rng(4);
  const Vocabulary vocab(U"abcdef");
  Recognizer model(tiny_config(), vocab.size());
  NoGradGuard guard;
  const ForwardContext ctx;
  const Var memory = model.encode(constant(random_tensor({1, 6, 8}, rng)), ctx);
  std::vector<int> tokens = {1, 3, 4, 5, 6, 7, 8, 3, 4, 5};
  const Tensor base = model.decode(memory, tokens, 10, ctx)->value;
  const int v = vocab.size();
  for (int changed = 1; changed < 10; ++changed) {
    std::vector<int> t = tokens;
    t[changed] = t[changed] == 3 ? 4 : 3;
    const Tensor other = model.decode(memory, t, 10, ctx)->value;
    for (int pos = 0; pos < changed; ++pos)
      for (int k = 0; k < v; ++k) REQUIRE(other[pos * v + k] == base[pos * v + k]);
    bool moved = false;
    for (int k = 0; k < v; ++k) moved |= other[changed * v + k] != base[changed * v + k];
    CHECK(moved);
  }
}

TEST_CASE("attention weights are causal and normalized") {
  std::mt19937_64 rng(5);
  std::vector<Tensor> probs;
  const Var q = constant(random_tensor({1, 4, 4}, rng));
  attention(q, q, q, 2, true, &probs);
  REQUIRE(probs.size() == 1);
  const Tensor& p = probs[0];
  for (int h = 0; h < 2; ++h)
    for (int i = 0; i < 4; ++i) {
      double s = 0;
      for (int j = 0; j < 4; ++j) {
        const double w = p[((h * 4) + i) * 4 + j];
        if (j > i) CHECK(w == 0.0);
        s += w;
      }
      CHECK(s == doctest::Approx(1.0));
    }
}

TEST_CASE("adamw step follows the update rule") {
  const Var p = parameter(Tensor({2}, {1.0, -2.0}));
  AdamWParams hp;
  hp.lr = 0.1;
  hp.weight_decay = 0.5;
  AdamW opt({p}, hp);
  p->grad_buffer() = Tensor({2}, {0.3, -0.4});
  opt.step();
  for (int i = 0; i < 2; ++i) {
    const double g = i ? -0.4 : 0.3, x0 = i ? -2.0 : 1.0;
    const double m = (1 - 0.9) * g / (1 - 0.9), v = (1 - 0.999) * g * g / (1 - 0.999);
    const double want = x0 - 0.1 * 0.5 * x0 - 0.1 * m / (std::sqrt(v) + 1e-8);
    CHECK(p->value[i] == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(opt.steps() == 1);
  opt.zero_grad();
  CHECK(p->grad[0] == 0.0);
}

TEST_CASE("vocabulary") {
  const Vocabulary v(U"ab٣");
  CHECK(v.size() == 6);
  CHECK(v.encode("ba٣") == std::vector<int>{4, 3, 5});
  CHECK(v.decode({1, 4, 3, 0, 5, 2}) == "ba٣");
  CHECK_THROWS_AS(v.encode("x"), Error);
  CHECK_THROWS_AS(Vocabulary(U"aa"), Error);
  const auto dir = testing::temp_dir("vocab");
  v.save(dir / "v.txt");
  CHECK(Vocabulary::load(dir / "v.txt") == v);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config json and validation") {
  ModelConfig c = tiny_config();
  const ModelConfig back = ModelConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(ModelConfig::from_json({{"d_model", 16}}).heads == 8);
  CHECK_THROWS_AS(ModelConfig::from_json({{"d_model", 12}}), Error);
  c.heads = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  const ModelConfig defaults;
  CHECK(defaults.d_model == 256);
  CHECK(defaults.enc_layers == 6);
  CHECK(defaults.heads == 8);
  CHECK(defaults.sequence_length() == 128);
}

TEST_CASE("checkpoint round trip keeps float32 values") {
  std::mt19937_64 rng(6);
  Recognizer model(tiny_config(), 9);
  for (auto& [name, buf] : model.buffers())
    for (double& v : buf->data) v = 0.25;
  const auto dir = testing::temp_dir("ckpt");
  save_checkpoint(dir / "m.ckpt", model);
  const auto loaded = load_checkpoint(dir / "m.ckpt");
  CHECK(loaded->config().to_json() == model.config().to_json());
  CHECK(loaded->vocab_size() == 9);
  const auto a = model.parameters(), b = loaded->parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    for (std::size_t j = 0; j < a[i].second->value.size(); ++j)
      REQUIRE(b[i].second->value[j] == static_cast<double>(static_cast<float>(a[i].second->value[j])));
  }
  for (const auto& [name, buf] : loaded->buffers()) CHECK(buf->data[0] == 0.25);
  save_checkpoint(dir / "again.ckpt", *loaded);
  CHECK(read_file(dir / "m.ckpt") == read_file(dir / "again.ckpt"));
  const std::vector<std::uint8_t> junk = {'n', 'o', 'p', 'e'};
  write_file(dir / "bad.ckpt", junk);
  CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a few steps reduce the loss on a fixed batch") {
  std::mt19937_64 rng(7);
  const Vocabulary vocab(U"٠١٢٣");
  ModelConfig c = tiny_config();
  c.lr = 3e-3;
  Recognizer model(c, vocab.size());
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 4; ++i) samples.push_back({random_image(48, 16, rng), i % 2 ? "٠١" : "٣٢٢"});
  const Batch batch = make_batch(samples, vocab, c);
  AdamW opt = make_optimizer(model);
  Rng r(1);
  const double first = train_step(model, opt, batch, r);
  double last = first;
  for (int i = 0; i < 60; ++i) last = train_step(model, opt, batch, r);
  CHECK(last < first * 0.5);
  const auto out = recognize(samples[0].image, model, vocab, 8);
  CHECK(out.tokens.size() <= 8);
  CHECK(out.tokens.size() == out.token_logprobs.size());
}
