#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "propmatch/detail/hash.hpp"
#include "propmatch/detail/io.hpp"
#include "propmatch/detail/random.hpp"
#include "propmatch/features.hpp"

namespace propmatch {

// Staged learning-rate schedule. The default mirrors the fixed training
// recipe: batch size 32, 10 epochs at 1e-3, then 5 at 1e-4 and 5 at 1e-5.
struct TrainingSchedule {
    struct Stage {
        int epochs;
        double learning_rate;
    };

    std::vector<Stage> stages;
    int batch_size = 32;

    static TrainingSchedule defaults() {
        return {{{10, 1e-3}, {5, 1e-4}, {5, 1e-5}}, 32};
    }

    int total_epochs() const {
        int n = 0;
        for (const auto& s : stages) n += s.epochs;
        return n;
    }

    nlohmann::json to_json() const {
        nlohmann::json st = nlohmann::json::array();
        for (const auto& s : stages)
            st.push_back({s.epochs, s.learning_rate});
        return {{"batch_size", batch_size}, {"stages", st}};
    }
};

struct Prediction {
    double score = 0.0;  // positive-class probability
    bool match = false;  // score >= 0.5
};

struct TrainingExample {
    std::vector<double> features;
    bool label = false;
};

namespace detail {

// Dense network with rectified-linear hidden layers and a softmax output,
// sized by `dims`. Kept generic so the gradient-check harness can run a
// small instance of the exact same forward/backward code.
struct Mlp {
    std::vector<std::size_t> dims;
    std::vector<std::vector<double>> weights;  // [layer], row-major out x in
    std::vector<std::vector<double>> biases;   // [layer]

    explicit Mlp(std::vector<std::size_t> layer_dims)
        : dims(std::move(layer_dims)) {
        weights.resize(layers());
        biases.resize(layers());
        for (std::size_t l = 0; l < layers(); ++l) {
            weights[l].assign(dims[l + 1] * dims[l], 0.0);
            biases[l].assign(dims[l + 1], 0.0);
        }
    }

    std::size_t layers() const { return dims.size() - 1; }

    // Symmetric uniform init scaled by 1/sqrt(fan_in); biases stay zero.
    void init(std::uint64_t seed) {
        Rng rng(seed);
        for (std::size_t l = 0; l < layers(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
            for (double& w : weights[l]) w = rng.next_real(-bound, bound);
        }
    }

    // Probabilities of the softmax output for one input.
    std::vector<double> forward(const std::vector<double>& x) const {
        std::vector<double> a = x;
        for (std::size_t l = 0; l < layers(); ++l) {
            a = affine(l, a);
            if (l + 1 < layers())
                for (double& v : a) v = v > 0.0 ? v : 0.0;
        }
        softmax_in_place(a);
        return a;
    }

    struct Gradients {
        std::vector<std::vector<double>> weights;
        std::vector<std::vector<double>> biases;

        explicit Gradients(const Mlp& net) {
            weights.resize(net.layers());
            biases.resize(net.layers());
            for (std::size_t l = 0; l < net.layers(); ++l) {
                weights[l].assign(net.weights[l].size(), 0.0);
                biases[l].assign(net.biases[l].size(), 0.0);
            }
        }
    };

    // Mean cross-entropy over the batch plus its parameter gradients.
    double loss_and_gradients(const std::vector<const std::vector<double>*>& xs,
                              const std::vector<int>& labels,
                              Gradients& grads) const {
        double total_loss = 0.0;
        std::vector<std::vector<double>> pre(layers());
        std::vector<std::vector<double>> act(layers() + 1);
        for (std::size_t n = 0; n < xs.size(); ++n) {
            act[0] = *xs[n];
            for (std::size_t l = 0; l < layers(); ++l) {
                pre[l] = affine(l, act[l]);
                act[l + 1] = pre[l];
                if (l + 1 < layers())
                    for (double& v : act[l + 1]) v = v > 0.0 ? v : 0.0;
            }
            // log-softmax keeps the loss finite for extreme logits
            const std::vector<double>& logits = pre[layers() - 1];
            double mx = logits[0];
            for (double z : logits) mx = std::max(mx, z);
            double sum = 0.0;
            for (double z : logits) sum += std::exp(z - mx);
            const double log_z = mx + std::log(sum);
            total_loss += log_z - logits[static_cast<std::size_t>(labels[n])];

            std::vector<double> delta(logits.size());
            for (std::size_t i = 0; i < logits.size(); ++i)
                delta[i] = std::exp(logits[i] - log_z);
            delta[static_cast<std::size_t>(labels[n])] -= 1.0;

            for (std::size_t l = layers(); l-- > 0;) {
                const std::size_t out = dims[l + 1], in = dims[l];
                for (std::size_t i = 0; i < out; ++i) {
                    grads.biases[l][i] += delta[i];
                    const double d = delta[i];
                    double* gw = &grads.weights[l][i * in];
                    const double* a = act[l].data();
                    for (std::size_t j = 0; j < in; ++j) gw[j] += d * a[j];
                }
                if (l == 0) break;
                std::vector<double> prev(in, 0.0);
                for (std::size_t i = 0; i < out; ++i) {
                    const double d = delta[i];
                    const double* w = &weights[l][i * in];
                    for (std::size_t j = 0; j < in; ++j) prev[j] += d * w[j];
                }
                for (std::size_t j = 0; j < in; ++j)
                    if (pre[l - 1][j] <= 0.0) prev[j] = 0.0;
                delta = std::move(prev);
            }
        }
        const double scale = 1.0 / static_cast<double>(xs.size());
        for (std::size_t l = 0; l < layers(); ++l) {
            for (double& g : grads.weights[l]) g *= scale;
            for (double& g : grads.biases[l]) g *= scale;
        }
        return total_loss * scale;
    }

    std::vector<double> affine(std::size_t l,
                               const std::vector<double>& x) const {
        const std::size_t out = dims[l + 1], in = dims[l];
        std::vector<double> y(out);
        for (std::size_t i = 0; i < out; ++i) {
            const double* w = &weights[l][i * in];
            double acc = biases[l][i];
            for (std::size_t j = 0; j < in; ++j) acc += w[j] * x[j];
            y[i] = acc;
        }
        return y;
    }

    static void softmax_in_place(std::vector<double>& z) {
        double mx = z[0];
        for (double v : z) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : z) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : z) v /= sum;
    }

    std::uint64_t fingerprint(std::uint64_t h) const {
        auto add = [&h](const std::vector<double>& v) {
            for (double x : v) {
                const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
                h = fnv1a64_bytes(&bits, sizeof bits, h);
            }
        };
        for (std::size_t l = 0; l < layers(); ++l) {
            add(weights[l]);
            add(biases[l]);
        }
        return h;
    }
};

// Adam moments, one slot per parameter, updated in a fixed order.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;

    explicit AdamState(const Mlp& net) {
        m_w.resize(net.layers());
        v_w.resize(net.layers());
        m_b.resize(net.layers());
        v_b.resize(net.layers());
        for (std::size_t l = 0; l < net.layers(); ++l) {
            m_w[l].assign(net.weights[l].size(), 0.0);
            v_w[l].assign(net.weights[l].size(), 0.0);
            m_b[l].assign(net.biases[l].size(), 0.0);
            v_b[l].assign(net.biases[l].size(), 0.0);
        }
    }

    void apply(Mlp& net, const Mlp::Gradients& grads, double learning_rate) {
        ++step;
        const double bc1 =
            1.0 - std::pow(beta1, static_cast<double>(step));
        const double bc2 =
            1.0 - std::pow(beta2, static_cast<double>(step));
        auto update = [&](std::vector<double>& params,
                          const std::vector<double>& g, std::vector<double>& m,
                          std::vector<double>& v) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                params[i] -= learning_rate * mhat / (std::sqrt(vhat) + epsilon);
            }
        };
        for (std::size_t l = 0; l < net.layers(); ++l) {
            update(net.weights[l], grads.weights[l], m_w[l], v_w[l]);
            update(net.biases[l], grads.biases[l], m_b[l], v_b[l]);
        }
    }
};

}  // namespace detail

inline constexpr std::array<std::size_t, 4> kClassifierDims = {
    kPairFeatureCount, 128, 64, 2};
inline constexpr double kStdFloor = 1e-8;

// Trained pair classifier: per-feature standardization followed by the fixed
// 637-128-64-2 network. Immutable once trained; concurrent predict is safe.
class ClassifierModel {
public:
    ClassifierModel()
        : net_(std::vector<std::size_t>(kClassifierDims.begin(),
                                        kClassifierDims.end())),
          mean_(kPairFeatureCount, 0.0),
          std_(kPairFeatureCount, 1.0) {}

    Prediction predict(const std::vector<double>& features) const {
        if (features.size() != kPairFeatureCount)
            throw error("predict expects " +
                        std::to_string(kPairFeatureCount) + " features, got " +
                        std::to_string(features.size()));
        std::vector<double> x(kPairFeatureCount);
        for (std::size_t i = 0; i < kPairFeatureCount; ++i) {
            if (!std::isfinite(features[i]))
                throw error("non-finite feature at slot " + std::to_string(i));
            x[i] = (features[i] - mean_[i]) / std_[i];
        }
        const std::vector<double> probs = net_.forward(x);
        Prediction p;
        p.score = probs[1];
        p.match = p.score >= 0.5;
        return p;
    }

    const std::vector<double>& feature_mean() const { return mean_; }
    const std::vector<double>& feature_std() const { return std_; }
    const nlohmann::json& metadata() const { return metadata_; }

    std::uint64_t fingerprint() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto add = [&h](const std::vector<double>& v) {
            for (double x : v) {
                const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
                h = detail::fnv1a64_bytes(&bits, sizeof bits, h);
            }
        };
        add(mean_);
        add(std_);
        return net_.fingerprint(h);
    }

    // Model file: magic, u32 format version, embedded metadata JSON, then
    // standardization vectors and layer parameters in declared order as
    // little-endian float64.
    void save(const std::string& path) const {
        std::ofstream out = detail::open_output(path);
        out.write(kModelMagic, 4);
        detail::write_u32(out, kModelFormatVersion);
        const std::string meta = metadata_.dump();
        detail::write_u64(out, meta.size());
        out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
        for (double v : mean_) detail::write_f64(out, v);
        for (double v : std_) detail::write_f64(out, v);
        for (std::size_t l = 0; l < net_.layers(); ++l) {
            for (double v : net_.weights[l]) detail::write_f64(out, v);
            for (double v : net_.biases[l]) detail::write_f64(out, v);
        }
        if (!out) throw error("failed writing model file: " + path);
    }

    static ClassifierModel load(const std::string& path) {
        std::ifstream in = detail::open_input(path);
        char magic[4];
        if (!in.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
            throw error("not a model file: " + path);
        const std::uint32_t version = detail::read_u32(in, "model version");
        if (version != kModelFormatVersion)
            throw error("unsupported model format version " +
                        std::to_string(version));
        const std::uint64_t meta_len = detail::read_u64(in, "metadata length");
        std::string meta(meta_len, '\0');
        if (!in.read(meta.data(), static_cast<std::streamsize>(meta_len)))
            throw error("truncated model file: " + path);
        ClassifierModel model;
        model.metadata_ = nlohmann::json::parse(meta, nullptr, false);
        if (model.metadata_.is_discarded())
            throw error("corrupted model metadata: " + path);
        for (double& v : model.mean_) v = detail::read_f64(in, "feature mean");
        for (double& v : model.std_) v = detail::read_f64(in, "feature std");
        for (std::size_t l = 0; l < model.net_.layers(); ++l) {
            for (double& v : model.net_.weights[l])
                v = detail::read_f64(in, "layer weights");
            for (double& v : model.net_.biases[l])
                v = detail::read_f64(in, "layer biases");
        }
        if (in.peek() != std::char_traits<char>::eof())
            throw error("trailing data in model file: " + path);
        return model;
    }

private:
    friend ClassifierModel train(const std::vector<TrainingExample>&,
                                 const TrainingSchedule&, std::uint64_t,
                                 std::vector<double>*);

    static constexpr char kModelMagic[4] = {'P', 'M', 'D', 'L'};
    static constexpr std::uint32_t kModelFormatVersion = 1;

    detail::Mlp net_;
    std::vector<double> mean_;
    std::vector<double> std_;
    nlohmann::json metadata_;
};

// Trains the fixed-architecture classifier with mini-batch Adam under the
// staged schedule. Bit-deterministic given (example order, schedule, seed):
// weight init and per-epoch shuffles come from generators derived from the
// seed, and the batch loop is strictly sequential. Adam moments and the
// bias-correction step carry across stage boundaries; stages change only the
// base step size. If epoch_losses is non-null it receives the mean training
// cross-entropy of every epoch.
inline ClassifierModel train(const std::vector<TrainingExample>& examples,
                             const TrainingSchedule& schedule,
                             std::uint64_t seed,
                             std::vector<double>* epoch_losses = nullptr) {
    std::size_t positives = 0;
    for (std::size_t n = 0; n < examples.size(); ++n) {
        const auto& ex = examples[n];
        if (ex.features.size() != kPairFeatureCount)
            throw error("training example " + std::to_string(n) + " has " +
                        std::to_string(ex.features.size()) +
                        " features, expected " +
                        std::to_string(kPairFeatureCount));
        for (double v : ex.features)
            if (!std::isfinite(v))
                throw error("non-finite feature in training example " +
                            std::to_string(n));
        if (ex.label) ++positives;
    }
    if (examples.empty() || positives == 0 || positives == examples.size())
        throw error("training set must contain at least one positive and one "
                    "negative example");
    if (schedule.batch_size <= 0) throw error("batch size must be positive");
    if (schedule.stages.empty()) throw error("schedule has no stages");

    ClassifierModel model;
    const double n_inv = 1.0 / static_cast<double>(examples.size());
    for (std::size_t i = 0; i < kPairFeatureCount; ++i) {
        double mean = 0.0;
        for (const auto& ex : examples) mean += ex.features[i];
        mean *= n_inv;
        double var = 0.0;
        for (const auto& ex : examples) {
            const double d = ex.features[i] - mean;
            var += d * d;
        }
        double sd = std::sqrt(var * n_inv);
        // Degenerate features get a neutral unit scale; a literal tiny
        // divisor would blow up any unseen test-time variation.
        if (sd < kStdFloor) sd = 1.0;
        model.mean_[i] = mean;
        model.std_[i] = sd;
    }

    std::vector<std::vector<double>> standardized(examples.size());
    std::vector<int> labels(examples.size());
    for (std::size_t n = 0; n < examples.size(); ++n) {
        standardized[n].resize(kPairFeatureCount);
        for (std::size_t i = 0; i < kPairFeatureCount; ++i)
            standardized[n][i] =
                (examples[n].features[i] - model.mean_[i]) / model.std_[i];
        labels[n] = examples[n].label ? 1 : 0;
    }

    model.net_.init(detail::derive_seed(seed, 1));
    detail::Rng shuffle_rng(detail::derive_seed(seed, 2));
    detail::AdamState adam(model.net_);

    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t batch_size = static_cast<std::size_t>(schedule.batch_size);

    std::vector<double> losses;
    for (const auto& stage : schedule.stages) {
        for (int epoch = 0; epoch < stage.epochs; ++epoch) {
            shuffle_rng.shuffle(order);
            double epoch_loss = 0.0;
            for (std::size_t begin = 0; begin < order.size();
                 begin += batch_size) {
                const std::size_t end =
                    std::min(order.size(), begin + batch_size);
                std::vector<const std::vector<double>*> xs;
                std::vector<int> ys;
                xs.reserve(end - begin);
                ys.reserve(end - begin);
                for (std::size_t k = begin; k < end; ++k) {
                    xs.push_back(&standardized[order[k]]);
                    ys.push_back(labels[order[k]]);
                }
                detail::Mlp::Gradients grads(model.net_);
                const double batch_loss =
                    model.net_.loss_and_gradients(xs, ys, grads);
                adam.apply(model.net_, grads, stage.learning_rate);
                epoch_loss += batch_loss * static_cast<double>(end - begin);
            }
            losses.push_back(epoch_loss * n_inv);
        }
    }
    if (epoch_losses) *epoch_losses = losses;

    std::uint64_t train_hash = 0xcbf29ce484222325ull;
    for (const auto& ex : examples) {
        const unsigned char label_byte = ex.label ? 1 : 0;
        train_hash = detail::fnv1a64_bytes(&label_byte, 1, train_hash);
        for (double v : ex.features) {
            const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
            train_hash = detail::fnv1a64_bytes(&bits, sizeof bits, train_hash);
        }
    }
    model.metadata_ = {
        {"format_version", 1},
        {"seed", seed},
        {"schedule", schedule.to_json()},
        {"optimizer",
         {{"type", "adam"}, {"beta1", 0.9}, {"beta2", 0.999},
          {"epsilon", 1e-8}}},
        {"activation", "relu"},
        {"examples", examples.size()},
        {"positives", positives},
        {"train_fingerprint", detail::to_hex(train_hash)},
        {"epoch_mean_loss", losses},
    };
    return model;
}

// Compares analytic gradients of a small seeded network (10-8-4-2, six random
// examples) against central finite differences (step 1e-5) for every
// parameter; returns the maximum relative error.
inline double gradient_check(std::uint64_t seed) {
    detail::Mlp net({10, 8, 4, 2});
    net.init(detail::derive_seed(seed, 11));
    detail::Rng data_rng(detail::derive_seed(seed, 12));

    const std::size_t n_examples = 6;
    std::vector<std::vector<double>> xs(n_examples,
                                        std::vector<double>(net.dims[0]));
    std::vector<int> labels(n_examples);
    for (std::size_t n = 0; n < n_examples; ++n) {
        for (double& v : xs[n]) v = data_rng.next_real(-1.0, 1.0);
        labels[n] = static_cast<int>(n % 2);
    }
    std::vector<const std::vector<double>*> xptrs;
    for (const auto& x : xs) xptrs.push_back(&x);

    detail::Mlp::Gradients analytic(net);
    net.loss_and_gradients(xptrs, labels, analytic);

    const double h = 1e-5;
    auto loss_at = [&]() {
        detail::Mlp::Gradients scratch(net);
        return net.loss_and_gradients(xptrs, labels, scratch);
    };
    double max_rel = 0.0;
    auto check_param = [&](double& param, double analytic_grad) {
        const double saved = param;
        param = saved + h;
        const double up = loss_at();
        param = saved - h;
        const double down = loss_at();
        param = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom =
            std::max(1e-8, std::abs(analytic_grad) + std::abs(numeric));
        max_rel = std::max(max_rel, std::abs(analytic_grad - numeric) / denom);
    };
    for (std::size_t l = 0; l < net.layers(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].size(); ++i)
            check_param(net.weights[l][i], analytic.weights[l][i]);
        for (std::size_t i = 0; i < net.biases[l].size(); ++i)
            check_param(net.biases[l][i], analytic.biases[l][i]);
    }
    return max_rel;
}

inline void save_model(const ClassifierModel& model, const std::string& path) {
    model.save(path);
}

inline ClassifierModel load_model(const std::string& path) {
    return ClassifierModel::load(path);
}

}  // namespace propmatch
