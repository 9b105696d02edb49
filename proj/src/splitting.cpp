#include "rdsync/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rdsync/engine.hpp"
#include "rdsync/io.hpp"
#include "rdsync/parallel.hpp"
#include "rdsync/random.hpp"

namespace rdsync {

using nlohmann::json;

double SplittingReport::lambda() const noexcept
{
    return verified ? 1.0 - std::min(mass_a, mass_b) : 1.0;
}

json SplittingReport::to_json() const
{
    json j;
    j["m"] = m;
    j["method"] = method == Method::ExactScan ? "ExactScan" : "MonteCarlo";
    j["verified"] = verified;
    j["blocks_examined"] = blocks_examined;
    if (verified) {
        j["witness_A"] = witness_a;
        j["witness_B"] = witness_b;
        j["box_A"] = json{{"lo", box_a.lo}, {"hi", box_a.hi}};
        j["box_B"] = json{{"lo", box_b.lo}, {"hi", box_b.hi}};
        j["mass_A"] = mass_a;
        j["mass_B"] = mass_b;
        j["stderr_A"] = stderr_a;
        j["stderr_B"] = stderr_b;
        j["lambda"] = lambda();
        if (method == Method::ExactScan) {
            j["set_A"] = set_a;
            j["set_B"] = set_b;
        }
    }
    return j;
}

namespace {

std::vector<NoiseValue> decode_block(std::size_t index, std::size_t q, std::size_t m)
{
    std::vector<NoiseValue> block(m);
    for (std::size_t i = m; i-- > 0;) {
        block[i] = static_cast<double>(index % q + 1);
        index /= q;
    }
    return block;
}

} // namespace

SplittingReport exact_splitting_scan(const MapFamily& fam, const JOrder& ord, std::size_t m,
                                     std::span<const double> probe_points)
{
    require(fam.noise().is_finite(), "exact_splitting_scan: requires finite noise");
    require(m >= 1, "exact_splitting_scan: m must be >= 1");
    require_dim(ord.dim(), fam.dim(), "exact_splitting_scan");
    const std::size_t q = fam.noise().symbols();
    double total = 1.0;
    for (std::size_t i = 0; i < m; ++i)
        total *= static_cast<double>(q);
    require(total <= 1e6, "exact_splitting_scan: q^m exceeds 1e6 blocks");
    const auto n_blocks = static_cast<std::size_t>(total);

    std::vector<std::vector<NoiseValue>> blocks(n_blocks);
    std::vector<Box> boxes(n_blocks);
    std::vector<double> mass(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        blocks[b] = decode_block(b, q, m);
        boxes[b] = image_box(fam, blocks[b], probe_points);
        mass[b] = 1.0;
        for (NoiseValue a : blocks[b])
            mass[b] *= fam.noise().prob(static_cast<std::size_t>(a));
    }

    // Heaviest blocks first; zero-mass blocks cannot certify anything.
    std::vector<std::size_t> order(n_blocks);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
    while (!order.empty() && mass[order.back()] <= 0.0)
        order.pop_back();

    SplittingReport rep;
    rep.m = m;
    rep.method = SplittingReport::Method::ExactScan;
    rep.blocks_examined = n_blocks;

    std::optional<std::pair<std::size_t, std::size_t>> seed_pair; // (lower, upper)
    for (std::size_t i = 0; i < order.size() && !seed_pair; ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const SetOrder o = cmp_boxes(boxes[order[i]], boxes[order[j]], ord);
            if (o == SetOrder::Less) {
                seed_pair = {order[i], order[j]};
                break;
            }
            if (o == SetOrder::Greater) {
                seed_pair = {order[j], order[i]};
                break;
            }
        }
    }
    if (!seed_pair)
        return rep;

    const auto [lower, upper] = *seed_pair;
    std::vector<std::size_t> set_a{lower};
    std::vector<std::size_t> set_b{upper};
    // A block joins A iff its box is below the hull of B (equivalently below
    // every box in B); symmetrically for B.
    Box hull_a = boxes[lower];
    Box hull_b = boxes[upper];
    for (std::size_t idx : order) {
        if (idx == lower || idx == upper)
            continue;
        if (cmp_boxes(boxes[idx], hull_b, ord) == SetOrder::Less) {
            set_a.push_back(idx);
            hull_a.expand(boxes[idx]);
        } else if (cmp_boxes(hull_a, boxes[idx], ord) == SetOrder::Less) {
            set_b.push_back(idx);
            hull_b.expand(boxes[idx]);
        }
    }

    rep.verified = true;
    rep.witness_a = blocks[lower];
    rep.witness_b = blocks[upper];
    rep.box_a = boxes[lower];
    rep.box_b = boxes[upper];
    std::sort(set_a.begin(), set_a.end());
    std::sort(set_b.begin(), set_b.end());
    for (std::size_t idx : set_a) {
        rep.mass_a += mass[idx];
        rep.set_a.push_back(blocks[idx]);
    }
    for (std::size_t idx : set_b) {
        rep.mass_b += mass[idx];
        rep.set_b.push_back(blocks[idx]);
    }
    return rep;
}

SplittingReport find_splitting_witness(const MapFamily& fam, const JOrder& ord, std::size_t m_max,
                                       std::span<const double> probe_points, std::size_t n_blocks,
                                       std::uint64_t seed)
{
    require(n_blocks >= 2, "find_splitting_witness: n_blocks must be >= 2");
    require(m_max >= 1, "find_splitting_witness: m_max must be >= 1");
    require_dim(ord.dim(), fam.dim(), "find_splitting_witness");

    SplittingReport rep;
    rep.method = SplittingReport::Method::MonteCarlo;
    for (std::size_t m = 1; m <= m_max; ++m) {
        rep.m = m;
        const std::uint64_t sub = derive_seed(seed, "splitting", m);
        std::vector<NoiseBlock> blocks(n_blocks);
        std::vector<Box> boxes(n_blocks);
        for (std::size_t b = 0; b < n_blocks; ++b) {
            blocks[b] = sample_block(fam.noise(), sub, b, m);
            boxes[b] = image_box(fam, blocks[b].values, probe_points);
        }
        rep.blocks_examined += n_blocks;

        std::optional<std::pair<std::size_t, std::size_t>> pair;
        for (std::size_t i = 0; i < n_blocks && !pair; ++i)
            for (std::size_t j = i + 1; j < n_blocks; ++j) {
                const SetOrder o = cmp_boxes(boxes[i], boxes[j], ord);
                if (o == SetOrder::Less) {
                    pair = {i, j};
                    break;
                }
                if (o == SetOrder::Greater) {
                    pair = {j, i};
                    break;
                }
            }
        if (!pair)
            continue;

        const auto [lower, upper] = *pair;
        std::size_t below = 0;
        std::size_t above = 0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            if (cmp_boxes(boxes[b], boxes[upper], ord) == SetOrder::Less)
                ++below;
            if (cmp_boxes(boxes[lower], boxes[b], ord) == SetOrder::Less)
                ++above;
        }
        const double n = static_cast<double>(n_blocks);
        rep.verified = true;
        rep.witness_a = blocks[lower].values;
        rep.witness_b = blocks[upper].values;
        rep.box_a = boxes[lower];
        rep.box_b = boxes[upper];
        rep.mass_a = static_cast<double>(below) / n;
        rep.mass_b = static_cast<double>(above) / n;
        rep.stderr_a = std::sqrt(rep.mass_a * (1.0 - rep.mass_a) / n);
        rep.stderr_b = std::sqrt(rep.mass_b * (1.0 - rep.mass_b) / n);
        return rep;
    }
    return rep;
}

SigmaDecaySeries sigma_decay(const MapFamily& fam, std::size_t m, std::span<const double> x, std::size_t s,
                             std::size_t j_max, std::size_t replicas, std::span<const double> probe_points,
                             std::uint64_t seed, unsigned threads, double window)
{
    const std::size_t k = fam.dim();
    require_dim(x.size(), k, "sigma_decay x");
    require(s >= 1 && s <= k, "sigma_decay: coordinate s outside 1..k");
    require(m >= 1 && j_max >= 1, "sigma_decay: m and j_max must be >= 1");
    require(replicas >= 100, "sigma_decay: replicas must be >= 100");
    require(window > 0.0, "sigma_decay: window must be positive");
    const std::size_t coord = s - 1;
    const std::uint64_t sub = derive_seed(seed, "sigma-decay");

    // hits[r * j_max + (j-1)] and clipped hull lengths, per replica.
    std::vector<unsigned char> hits(replicas * j_max, 0);
    std::vector<double> lengths(replicas * j_max, 0.0);
    parallel_for(replicas, threads, [&](std::size_t r) {
        const NoiseBlock block = sample_block(fam.noise(), sub, r, j_max * m);
        const std::span<const NoiseValue> values(block.values);
        std::vector<double> cloud;
        for (std::size_t j = 1; j <= j_max; ++j) {
            cloud.assign(probe_points.begin(), probe_points.end());
            compose_in_place(fam, values.first(j * m), cloud);
            double lo = cloud[coord];
            double hi = cloud[coord];
            for (std::size_t off = coord; off < cloud.size(); off += k) {
                lo = std::min(lo, cloud[off]);
                hi = std::max(hi, cloud[off]);
            }
            hits[r * j_max + j - 1] = (x[coord] >= lo && x[coord] <= hi) ? 1 : 0;
            lengths[r * j_max + j - 1] = std::max(0.0, std::min(hi, window) - std::max(lo, -window));
        }
    });

    SigmaDecaySeries out;
    out.x.assign(x.begin(), x.end());
    out.s = s;
    out.m = m;
    out.replicas = replicas;
    const double n = static_cast<double>(replicas);
    for (std::size_t j = 1; j <= j_max; ++j) {
        std::size_t count = 0;
        double len = 0.0;
        for (std::size_t r = 0; r < replicas; ++r) {
            count += hits[r * j_max + j - 1];
            len += lengths[r * j_max + j - 1];
        }
        const double p = static_cast<double>(count) / n;
        out.p_hat.push_back(p);
        out.stderr_.push_back(std::sqrt(p * (1.0 - p) / n));
        out.mean_length.push_back(len / n);
        if (count == 0) {
            out.zero_at = j;
            break;
        }
    }

    // Weighted least squares through the origin: log p_j = j log(lambda),
    // weights ~ inverse delta-method variance n p / (1 - p).
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 1; j <= out.p_hat.size(); ++j) {
        const double p = out.p_hat[j - 1];
        if (p <= 0.0)
            continue;
        const double w = n * p / std::max(1.0 - p, 0.5 / n);
        num += w * static_cast<double>(j) * std::log(p);
        den += w * static_cast<double>(j * j);
    }
    out.lambda_bound = den > 0.0 ? std::exp(num / den) : 0.0;
    return out;
}

void write_sigma_csv(std::ostream& os, const SigmaDecaySeries& series, std::uint64_t seed)
{
    io::csv_header(os, seed, {"j", "p_hat", "stderr", "lambda_pow_j"},
                   "s=" + std::to_string(series.s) + " m=" + std::to_string(series.m) +
                       " replicas=" + std::to_string(series.replicas));
    for (std::size_t j = 1; j <= series.p_hat.size(); ++j)
        io::csv_row(os, {std::to_string(j), io::num(series.p_hat[j - 1]), io::num(series.stderr_[j - 1]),
                         io::num(std::pow(series.lambda_bound, static_cast<double>(j)))});
}

} // namespace rdsync
