#include "ipmc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ipmc/error.hpp"

namespace ipmc {

void WindowConfig::validate() const {
    if (tau < 1) throw_domain("window tau must be at least 1");
    if (stride < 1) throw_domain("window stride must be at least 1");
}

std::string_view to_string(Split split) noexcept {
    switch (split) {
    case Split::Train:
        return "train";
    case Split::Validation:
        return "validation";
    case Split::Test:
        return "test";
    }
    return "unknown";
}

Split split_from_string(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "validation") return Split::Validation;
    if (name == "test") return Split::Test;
    throw_data("unknown split tag '" + std::string(name) + "'");
}

void SplitRatios::validate() const {
    for (double r : {train, test, validation}) {
        if (!(r >= 0.0 && r <= 1.0)) throw_domain("split ratios must lie in [0, 1]");
    }
    if (std::abs(train + test + validation - 1.0) > 1e-9) {
        throw_domain("split ratios must sum to 1");
    }
}

std::size_t WindowedDataset::count(Split which) const {
    return static_cast<std::size_t>(std::count(split.begin(), split.end(), which));
}

std::vector<std::size_t> WindowedDataset::rows_in(Split which) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] == which) out.push_back(i);
    }
    return out;
}

WindowedDataset WindowedDataset::subset(const std::vector<std::size_t>& rows) const {
    WindowedDataset d;
    d.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
    d.targets.resize(static_cast<Eigen::Index>(rows.size()));
    d.split.reserve(rows.size());
    d.end_index.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        d.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(r);
        d.targets(static_cast<Eigen::Index>(i)) = targets(r);
        d.split.push_back(split[rows[i]]);
        d.end_index.push_back(end_index[rows[i]]);
    }
    d.sample_rate = sample_rate;
    d.start_time = start_time;
    d.input_label = input_label;
    d.target_label = target_label;
    return d;
}

namespace {

WindowedDataset frame(const Signal& x, const Signal* y, const WindowConfig& cfg) {
    cfg.validate();
    if (x.size() < cfg.tau) {
        throw_data("signal of length " + std::to_string(x.size()) + " is shorter than the window (" +
                   std::to_string(cfg.tau) + "): empty dataset");
    }
    const std::size_t n = (x.size() - cfg.tau) / cfg.stride + 1;
    const auto tau = static_cast<Eigen::Index>(cfg.tau);

    WindowedDataset d;
    d.inputs.resize(static_cast<Eigen::Index>(n), tau);
    d.targets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    d.split.assign(n, Split::Train);
    d.end_index.resize(n);
    d.sample_rate = x.sample_rate();
    d.start_time = x.start_time();
    d.input_label = x.label();
    if (y != nullptr) d.target_label = y->label();

    const auto xs = x.samples();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = i * cfg.stride;
        for (Eigen::Index j = 0; j < tau; ++j) {
            d.inputs(static_cast<Eigen::Index>(i), j) = xs[first + static_cast<std::size_t>(j)];
        }
        d.end_index[i] = first + cfg.tau - 1;
        if (y != nullptr) d.targets(static_cast<Eigen::Index>(i)) = (*y)[d.end_index[i]];
    }
    return d;
}

} // namespace

WindowedDataset frame_windows(const Signal& x, const Signal& y, const WindowConfig& cfg) {
    if (x.size() != y.size()) {
        throw_data("input and target lengths differ (" + std::to_string(x.size()) + " vs " +
                   std::to_string(y.size()) + ")");
    }
    if (x.sample_rate() != y.sample_rate()) {
        throw_data("input and target sample rates differ");
    }
    return frame(x, &y, cfg);
}

WindowedDataset frame_inputs(const Signal& x, const WindowConfig& cfg) { return frame(x, nullptr, cfg); }

WindowedDataset split_dataset(WindowedDataset d, const SplitRatios& ratios, std::uint64_t seed) {
    ratios.validate();
    const std::size_t n = d.rows();
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.test));
    const auto n_validation = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.validation));
    if (n_test + n_validation > n) {
        throw_domain("split counts exceed the number of rows");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    d.split.assign(n, Split::Train);
    for (std::size_t i = 0; i < n_test; ++i) d.split[order[i]] = Split::Test;
    for (std::size_t i = n_test; i < n_test + n_validation; ++i) d.split[order[i]] = Split::Validation;
    return d;
}

WindowedDataset with_split_of(WindowedDataset d, const WindowedDataset& tagged) {
    if (d.rows() != tagged.rows()) {
        throw_data("cannot copy split tags between datasets of different sizes");
    }
    d.split = tagged.split;
    return d;
}

WindowedDataset concatenate(const std::vector<WindowedDataset>& parts) {
    if (parts.empty()) throw_data("nothing to concatenate");
    Eigen::Index rows = 0;
    for (const auto& p : parts) {
        if (p.inputs.cols() != parts.front().inputs.cols()) throw_data("datasets differ in window length");
        rows += p.inputs.rows();
    }
    WindowedDataset d;
    d.inputs.resize(rows, parts.front().inputs.cols());
    d.targets.resize(rows);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        d.inputs.middleRows(at, p.inputs.rows()) = p.inputs;
        d.targets.segment(at, p.targets.size()) = p.targets;
        d.split.insert(d.split.end(), p.split.begin(), p.split.end());
        d.end_index.insert(d.end_index.end(), p.end_index.begin(), p.end_index.end());
        at += p.inputs.rows();
    }
    d.sample_rate = parts.front().sample_rate;
    d.start_time = parts.front().start_time;
    d.input_label = "pooled";
    d.target_label = "pooled";
    return d;
}

AuditResult audit_non_autoregressive(const WindowedDataset& d, const Signal& input, const Signal& target) {
    const auto fail = [](std::string msg) { return AuditResult{false, std::move(msg)}; };
    if (!input.label().empty() && input.label() == target.label()) {
        return fail("input signal carries the target's label '" + target.label() + "'");
    }
    if (input.size() == target.size() && input.size() > 0 &&
        std::equal(input.samples().begin(), input.samples().end(), target.samples().begin())) {
        return fail("input signal is identical to the target signal");
    }
    if (d.end_index.size() != d.rows() || d.split.size() != d.rows()) {
        return fail("dataset bookkeeping is inconsistent");
    }
    const auto tau = static_cast<std::size_t>(d.inputs.cols());
    const auto xs = input.samples();
    const auto ys = target.samples();
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const std::size_t last = d.end_index[i];
        if (last + 1 < tau || last >= xs.size() || last >= ys.size()) {
            return fail("row " + std::to_string(i) + " points outside the source signals");
        }
        const std::size_t first = last + 1 - tau;
        for (std::size_t j = 0; j < tau; ++j) {
            if (d.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != xs[first + j]) {
                return fail("row " + std::to_string(i) + " column " + std::to_string(j) +
                            " is not drawn from the input signal");
            }
        }
        if (d.targets(static_cast<Eigen::Index>(i)) != ys[last]) {
            return fail("row " + std::to_string(i) + " target is not aligned with the window end");
        }
    }
    return {true, "ok"};
}

} // namespace ipmc
