#include "delayrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "delayrc/errors.hpp"

namespace delayrc {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& states, double lambda) {
    if (!(lambda > 0.0)) throw NumericalError("ridge regularization must be positive");
    const Eigen::Index n = states.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(states.transpose());
    gram.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
        throw NumericalError("Cholesky factorization of S^T S + lambda I failed");
    }
    return llt;
}

}  // namespace

double ridge_lambda(const Eigen::MatrixXd& states, const RidgeConfig& cfg) {
    const double lambda =
        cfg.lambda_abs ? *cfg.lambda_abs
                       : cfg.lambda_rule * (states.size() > 0 ? states.cwiseAbs().maxCoeff() : 0.0);
    if (!(lambda > 0.0)) {
        throw NumericalError("ridge regularization is not positive (state matrix identically zero?)");
    }
    return lambda;
}

Eigen::VectorXd train_ridge(const Eigen::MatrixXd& states, const Eigen::VectorXd& target,
                            double lambda) {
    if (states.rows() != target.size()) throw ConfigError("target length does not match K");
    const auto llt = factor_gram(states, lambda);
    return llt.solve(states.transpose() * target);
}

double nrmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target) {
    if (prediction.size() != target.size() || target.size() == 0) {
        throw ConfigError("nrmse: prediction and target lengths differ");
    }
    const double k = static_cast<double>(target.size());
    const double var = (target.array() - target.mean()).square().sum() / k;
    if (!(var > 0.0)) throw NumericalError("nrmse: target has zero variance");
    return std::sqrt((target - prediction).squaredNorm() / (k * var));
}

double capacity(const Eigen::MatrixXd& states, const Eigen::VectorXd& target, double lambda) {
    if (states.rows() != target.size()) throw ConfigError("target length does not match K");
    const double norm2 = target.squaredNorm();
    if (!(norm2 > 0.0)) throw NumericalError("capacity: target has zero norm");
    const auto llt = factor_gram(states, lambda);
    const Eigen::VectorXd proj = states.transpose() * target;
    return proj.dot(llt.solve(proj)) / norm2;
}

RecallTarget recall_target(const InputSequence& inputs, int l) {
    if (l < 0) throw ConfigError("recall depth must be nonnegative");
    if (l > inputs.prehistory) {
        throw ConfigError("recall depth " + std::to_string(l) + " exceeds the retained prehistory of " +
                          std::to_string(inputs.prehistory) + " inputs");
    }
    const int k = inputs.training_size();
    RecallTarget out;
    out.l = l;
    out.values = Eigen::Map<const Eigen::VectorXd>(inputs.values.data() + inputs.prehistory - l, k);
    return out;
}

InputSequence shift_window(const InputSequence& inputs, int l) {
    if (l < 0 || l > inputs.prehistory) throw ConfigError("window shift out of range");
    InputSequence out;
    out.seed = inputs.seed;
    out.prehistory = inputs.prehistory - l;
    out.values.assign(inputs.values.begin(), inputs.values.end() - l);
    return out;
}

CapacitySpectrum memory_capacity(const StateMatrix& states, const InputSequence& inputs,
                                 const CapacityOptions& options) {
    const Eigen::MatrixXd& s = states.entries;
    if (s.rows() != inputs.training_size()) {
        throw ConfigError("state matrix rows do not match the number of training inputs");
    }
    if (options.l_max < 0) throw ConfigError("l_max must be nonnegative");

    CapacitySpectrum out;
    out.lambda = ridge_lambda(s, options.ridge);
    const auto llt = factor_gram(s, out.lambda);
    const auto k = static_cast<double>(s.rows());
    out.cutoff = options.apply_cutoff
                     ? chi2_threshold(static_cast<int>(s.cols()), options.p_value) / k
                     : 0.0;

    const int limit = inputs.prehistory;
    auto compute = [&](int l0, int l1) {
        for (int l = l0; l <= l1; ++l) {
            const RecallTarget y = recall_target(inputs, l);
            const double norm2 = y.values.squaredNorm();
            if (!(norm2 > 0.0)) throw NumericalError("recall target has zero norm");
            const Eigen::VectorXd proj = s.transpose() * y.values;
            double c = proj.dot(llt.solve(proj)) / norm2;
            if (c < out.cutoff) c = 0.0;
            out.capacities.push_back(c);
        }
    };

    int last = std::min(options.l_max, limit);
    compute(0, last);
    if (options.auto_extend) {
        auto tail = [&] {
            double sum = 0.0;
            const auto n = out.capacities.size();
            for (std::size_t i = n > 10 ? n - 10 : 0; i < n; ++i) sum += out.capacities[i];
            return sum;
        };
        while (tail() > options.tail_tolerance && last < limit) {
            const int next = std::min(last + 10, limit);
            compute(last + 1, next);
            last = next;
        }
    }
    for (double c : out.capacities) out.mc_total += c;
    return out;
}

}  // namespace delayrc
