#include "ipmc/lm_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ipmc/error.hpp"

namespace ipmc {

void LmConfig::validate() const {
    if (!(mu0 > 0.0)) throw_domain("lm mu0 must be positive");
    if (!(mu_max > mu0)) throw_domain("lm mu_max must exceed mu0");
    if (!(mu_increase > 1.0)) throw_domain("lm mu_increase must exceed 1");
    if (!(mu_decrease > 0.0 && mu_decrease < 1.0)) throw_domain("lm mu_decrease must lie in (0, 1)");
    if (!(min_gradient >= 0.0)) throw_domain("lm min_gradient must be non-negative");
    if (patience < 1) throw_domain("lm patience must be at least 1");
}

std::string to_string(StopReason r) {
    switch (r) {
    case StopReason::MaxEpochs:
        return "max_epochs";
    case StopReason::MuMax:
        return "mu_max";
    case StopReason::MinGradient:
        return "min_gradient";
    case StopReason::ValidationStop:
        return "validation_stop";
    }
    return "unknown";
}

namespace {

struct Rows {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets; // normalized
};

Rows canonical_rows(const WindowedDataset& d, Split which, const MlpModel& m) {
    std::vector<std::size_t> idx = d.rows_in(which);
    std::sort(idx.begin(), idx.end(), [&d](std::size_t a, std::size_t b) {
        const auto ra = d.inputs.row(static_cast<Eigen::Index>(a));
        const auto rb = d.inputs.row(static_cast<Eigen::Index>(b));
        for (Eigen::Index j = 0; j < ra.size(); ++j) {
            if (ra(j) != rb(j)) return ra(j) < rb(j);
        }
        return d.targets(static_cast<Eigen::Index>(a)) < d.targets(static_cast<Eigen::Index>(b));
    });
    const WindowedDataset s = d.subset(idx);
    Rows r{s.inputs, s.targets};
    for (Eigen::Index i = 0; i < r.targets.size(); ++i) r.targets(i) = m.output_norm.normalize(r.targets(i));
    return r;
}

double sse(const MlpModel& m, const Rows& rows) {
    return (rows.targets - forward_normalized(m, rows.inputs)).squaredNorm();
}

} // namespace

TrainResult train_lm(const MlpModel& initial, const WindowedDataset& d, const LmConfig& cfg) {
    cfg.validate();
    initial.validate();
    if (d.rows() == 0) throw_domain("training dataset is empty");
    if (static_cast<std::size_t>(d.inputs.cols()) != initial.input_size()) {
        throw_domain("dataset window width does not match the model input");
    }

    const Rows train = canonical_rows(d, Split::Train, initial);
    const Rows validation = canonical_rows(d, Split::Validation, initial);
    if (train.targets.size() == 0) throw_domain("training split is empty");
    if (validation.targets.size() == 0) throw_domain("validation split is empty");

    TrainResult result{initial, {}};
    TrainingReport& report = result.report;
    report.train_rows = static_cast<std::size_t>(train.targets.size());
    report.validation_rows = static_cast<std::size_t>(validation.targets.size());

    MlpModel current = initial;
    double mu = cfg.mu0;
    double train_sse = sse(current, train);
    double best_validation = sse(current, validation);
    report.epochs.push_back({0, train_sse, best_validation, mu, 0.0, 0});
    report.best_validation_sse = best_validation;

    const auto p = static_cast<Eigen::Index>(current.parameter_count());
    std::size_t validation_failures = 0;
    report.stop_reason = StopReason::MaxEpochs;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const Eigen::MatrixXd J = jacobian(current, train.inputs);
        const Eigen::VectorXd r = train.targets - forward_normalized(current, train.inputs);
        const Eigen::VectorXd g = J.transpose() * r;
        const double gradient_norm = g.lpNorm<Eigen::Infinity>();
        if (gradient_norm < cfg.min_gradient) {
            report.stop_reason = StopReason::MinGradient;
            break;
        }

        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
        H.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
        const Eigen::VectorXd theta = current.parameters();

        bool accepted = false;
        std::size_t rejected = 0;
        MlpModel candidate = current;
        while (!accepted) {
            Eigen::MatrixXd A = H;
            A.diagonal().array() += mu;
            const Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(A);
            if (llt.info() != Eigen::Success) {
                throw_numeric("normal equations are not positive definite at mu = " + std::to_string(mu));
            }
            const Eigen::VectorXd step = llt.solve(g);
            candidate.set_parameters(theta - step);
            const double candidate_sse = step.allFinite() ? sse(candidate, train) : INFINITY;
            if (candidate_sse < train_sse) {
                accepted = true;
                train_sse = candidate_sse;
                mu *= cfg.mu_decrease;
            } else {
                ++rejected;
                mu *= cfg.mu_increase;
                if (mu > cfg.mu_max) break;
            }
        }
        if (!accepted) {
            report.stop_reason = StopReason::MuMax;
            break;
        }

        current = candidate;
        ++report.accepted_steps;
        const double validation_sse = sse(current, validation);
        report.epochs.push_back({epoch, train_sse, validation_sse, mu, gradient_norm, rejected});

        if (validation_sse < best_validation) {
            best_validation = validation_sse;
            report.best_validation_sse = validation_sse;
            report.best_epoch = epoch;
            result.model = current;
            validation_failures = 0;
        } else if (++validation_failures >= cfg.patience) {
            report.stop_reason = StopReason::ValidationStop;
            break;
        }
    }
    return result;
}

} // namespace ipmc
