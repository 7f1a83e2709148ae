#pragma once

#include "heatcast/nn/adam.hpp"
#include "heatcast/nn/model.hpp"
#include "heatcast/tensor_assembly.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <vector>

namespace heatcast::nn {

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_mse = 0;
    double val_mse = 0;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainingLog {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_val_mse = std::numeric_limits<double>::infinity();
    bool stopped_early = false;
};

/// Writes `epoch,train_mse,val_mse`.
void write_training_log(std::ostream& out, const TrainingLog& log);

/// Tracks the best validation loss and signals a stop after `patience` epochs without a strict improvement.
class EarlyStopping {
public:
    explicit EarlyStopping(int patience) : patience_(patience) {}

    /// Returns true when the epoch improved on the best loss so far.
    bool observe(int epoch, double val_loss) {
        if (val_loss < best_) {
            best_ = val_loss;
            best_epoch_ = epoch;
            stale_ = 0;
            return true;
        }
        ++stale_;
        return false;
    }

    bool should_stop() const noexcept { return stale_ >= patience_; }
    int best_epoch() const noexcept { return best_epoch_; }
    double best_loss() const noexcept { return best_; }

private:
    int patience_;
    int stale_ = 0;
    int best_epoch_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

/// Examples converted to the training scalar type.
template <typename Scalar>
struct TrainingSet {
    std::vector<Tensor3<Scalar>> inputs;
    std::vector<Vector<Scalar>> targets;

    explicit TrainingSet(std::span<const Example> examples) {
        inputs.reserve(examples.size());
        targets.reserve(examples.size());
        for (const auto& ex : examples) {
            const auto& t = ex.input.channels;
            Tensor3<Scalar> cast(t.channels, t.rows, t.cols);
            cast.data = t.data.template cast<Scalar>();
            inputs.push_back(std::move(cast));
            targets.push_back(ex.target.template cast<Scalar>());
        }
    }
    std::size_t size() const { return inputs.size(); }
};

template <typename Scalar>
double evaluate_mse(const Parameters<Scalar>& params, const ModelConfig& cfg, const TrainingSet<Scalar>& set) {
    if (set.size() == 0) throw DataError("cannot evaluate on an empty set");
    double total = 0;
    const std::size_t chunk = std::size_t(cfg.batch_size);
    ForwardCache<Scalar> cache;
    for (std::size_t first = 0; first < set.size(); first += chunk) {
        const std::size_t count = std::min(chunk, set.size() - first);
        std::vector<const Tensor3<Scalar>*> inputs;
        Matrix<Scalar> targets(cfg.output_size, Index(count));
        for (std::size_t b = 0; b < count; ++b) {
            inputs.push_back(&set.inputs[first + b]);
            targets.col(Index(b)) = set.targets[first + b];
        }
        const auto out = forward_batch<Scalar, std::mt19937_64>(params, cfg, pack_batch<Scalar>(inputs, cfg), false,
                                                                 nullptr, &cache);
        total += double(mse_loss(out, targets)) * double(count);
    }
    return total / double(set.size());
}

/// Mean per-example MSE of an inference pass over `examples`.
template <typename Scalar>
double evaluate_mse(const Parameters<Scalar>& params, const ModelConfig& cfg, std::span<const Example> examples) {
    return evaluate_mse(params, cfg, TrainingSet<Scalar>(examples));
}

template <typename Scalar>
struct TrainResult {
    Parameters<Scalar> params;  // snapshot with the lowest validation loss
    TrainingLog log;
};

/// Adam on shuffled mini-batches with validation-based model selection. The last partial batch of
/// an epoch is kept. Seeding fixes initialisation, shuffling and dropout.
template <typename Scalar = double>
TrainResult<Scalar> train(const ModelConfig& cfg, std::span<const Example> train_set,
                          std::span<const Example> val_set, std::uint64_t seed,
                          const std::function<void(const EpochRecord&)>& on_epoch = {},
                          const Parameters<Scalar>* initial = nullptr) {
    cfg.validate();
    if (train_set.empty()) throw DataError("training set is empty");
    if (val_set.empty()) throw DataError("validation set is empty");
    for (const auto& ex : train_set)
        if (ex.target.size() != cfg.output_size) throw DataError("training target length differs from output size");

    std::seed_seq init_seq{seed, std::uint64_t{1}};
    std::seed_seq shuffle_seq{seed, std::uint64_t{2}};
    std::seed_seq dropout_seq{seed, std::uint64_t{3}};
    std::mt19937_64 init_rng(init_seq), shuffle_rng(shuffle_seq), dropout_rng(dropout_seq);

    TrainResult<Scalar> result;
    Parameters<Scalar> params = initial ? *initial : Parameters<Scalar>::glorot(cfg, init_rng);
    params.check_shapes(cfg);
    result.params = params;
    auto state = AdamState<Scalar>::fresh(cfg);
    const auto settings = AdamSettings::from(cfg);
    EarlyStopping stopper(cfg.patience);

    const TrainingSet<Scalar> train_data(train_set), val_data(val_set);
    ForwardCache<Scalar> cache;
    Parameters<Scalar> grads;
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = std::size_t(cfg.batch_size);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        // Fisher-Yates with an explicit draw so the order only depends on the generator.
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng() % i]);

        double loss_sum = 0;
        for (std::size_t first = 0; first < order.size(); first += batch) {
            const std::size_t count = std::min(batch, order.size() - first);
            std::vector<const Tensor3<Scalar>*> inputs;
            Matrix<Scalar> targets(cfg.output_size, Index(count));
            for (std::size_t b = 0; b < count; ++b) {
                inputs.push_back(&train_data.inputs[order[first + b]]);
                targets.col(Index(b)) = train_data.targets[order[first + b]];
            }
            const auto out = forward_batch(params, cfg, pack_batch<Scalar>(inputs, cfg), true, &dropout_rng, &cache);
            loss_sum += double(mse_loss(out, targets)) * double(count);
            backward(params, cfg, cache, targets, grads);
            adam_step(params, grads, state, settings);
        }

        EpochRecord rec{epoch, loss_sum / double(order.size()), evaluate_mse(params, cfg, val_data)};
        result.log.epochs.push_back(rec);
        if (stopper.observe(epoch, rec.val_mse)) result.params = params;
        if (on_epoch) on_epoch(rec);
        if (stopper.should_stop()) {
            result.log.stopped_early = epoch < cfg.max_epochs;
            break;
        }
    }
    result.log.best_epoch = stopper.best_epoch();
    result.log.best_val_mse = stopper.best_loss();
    return result;
}

}  // namespace heatcast::nn
