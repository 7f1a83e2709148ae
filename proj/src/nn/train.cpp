#include "heatcast/nn/train.hpp"

#include "heatcast/io.hpp"

namespace heatcast::nn {

void write_training_log(std::ostream& out, const TrainingLog& log) {
    out << "epoch,train_mse,val_mse\n";
    for (const auto& e : log.epochs)
        out << e.epoch << ',' << format_double(e.train_mse) << ',' << format_double(e.val_mse) << '\n';
}

}  // namespace heatcast::nn
