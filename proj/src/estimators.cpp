// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file estimators.cpp
//---------------------------------------------------------------------------//
#include "shapley/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <string>
#include <thread>

#include "shapley/errors.hpp"

namespace shapley
{
namespace
{
//---------------------------------------------------------------------------//
// Neumaier-compensated running sum
class CompensatedSum
{
  public:
    void add(double v)
    {
        double const t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Per-variable statistics of one chunk of samples.
 *
 * \c m2 holds the sum of squared deviations from the chunk mean; chunks are
 * merged with the parallel-variance update, so the final variance equals the
 * two-pass value up to rounding.
 */
struct ChunkStats
{
    std::size_t count = 0;
    std::vector<double> sum;
    std::vector<double> m2;
    std::vector<std::uint64_t> credits;
    double aux_sum = 0;
};

ChunkStats merge(ChunkStats a, ChunkStats const& b)
{
    if (a.count == 0)
        return b;
    if (b.count == 0)
        return a;
    auto const na = static_cast<double>(a.count);
    auto const nb = static_cast<double>(b.count);
    for (std::size_t j = 0; j < a.sum.size(); ++j)
    {
        double const delta = b.sum[j] / nb - a.sum[j] / na;
        a.m2[j] += b.m2[j] + delta * delta * na * nb / (na + nb);
        a.sum[j] += b.sum[j];
        a.credits[j] += b.credits[j];
    }
    a.aux_sum += b.aux_sum;
    a.count += b.count;
    return a;
}

// Fixed-shape pairwise reduction over chunk order
ChunkStats reduce(std::vector<ChunkStats> const& chunks, std::size_t lo,
                  std::size_t hi)
{
    if (hi - lo == 1)
        return chunks[lo];
    auto const mid = lo + (hi - lo) / 2;
    return merge(reduce(chunks, lo, mid), reduce(chunks, mid, hi));
}

//---------------------------------------------------------------------------//
/*!
 * Statistics from a chunk's increments.
 *
 * \c g is row-major (count x d). \c credited flags which entries received an
 * increment; uncredited entries must be zero.
 */
ChunkStats summarize(std::size_t d, std::size_t count,
                     std::vector<double> const& g,
                     std::vector<std::uint64_t> credits, double aux_sum)
{
    ChunkStats s;
    s.count = count;
    s.sum.assign(d, 0.0);
    s.m2.assign(d, 0.0);
    s.credits = std::move(credits);
    s.aux_sum = aux_sum;
    for (std::size_t j = 0; j < d; ++j)
    {
        CompensatedSum acc;
        for (std::size_t i = 0; i < count; ++i)
            acc.add(g[i * d + j]);
        s.sum[j] = acc.value();
        double const mean = s.sum[j] / static_cast<double>(count);
        CompensatedSum sq;
        for (std::size_t i = 0; i < count; ++i)
        {
            double const dev = g[i * d + j] - mean;
            sq.add(dev * dev);
        }
        s.m2[j] = sq.value();
    }
    return s;
}

//---------------------------------------------------------------------------//
// Run work(chunk) for every chunk on up to `workers` threads. Exceptions are
// rethrown in chunk order so the reported failure does not depend on timing.
template<class Result, class Work>
std::vector<Result> run_chunks(std::size_t num_chunks, std::size_t workers,
                               Work&& work)
{
    std::vector<Result> results(num_chunks);
    std::vector<std::exception_ptr> errors(num_chunks);
    std::atomic<std::size_t> next{0};

    auto drain = [&] {
        for (std::size_t c = next++; c < num_chunks; c = next++)
        {
            try
            {
                results[c] = work(c);
            }
            catch (...)
            {
                errors[c] = std::current_exception();
            }
        }
    };

    workers = std::clamp<std::size_t>(workers, 1, num_chunks);
    if (workers == 1)
    {
        drain();
    }
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(drain);
    }

    for (auto const& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
    return results;
}

//---------------------------------------------------------------------------//
std::string format_point(std::span<double const> x)
{
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t j = 0; j < x.size(); ++j)
        os << (j ? ", " : "") << x[j];
    os << ')';
    return os.str();
}

// Evaluate f, attaching the sample index to any failure
double evaluate_at(ModelFunction const& f, std::span<double const> z,
                   std::size_t sample)
{
    double value = 0;
    try
    {
        value = f(z);
    }
    catch (EvaluationError const& e)
    {
        throw EvaluationError(std::string(e.what()) + " (sample "
                                  + std::to_string(sample) + ")",
                              sample, e.line());
    }
    catch (DomainError const& e)
    {
        throw EvaluationError(std::string(e.what()) + " at sample "
                                  + std::to_string(sample) + ", x = "
                                  + format_point(z),
                              sample);
    }
    if (!std::isfinite(value))
    {
        throw EvaluationError("non-finite model output at sample "
                                  + std::to_string(sample) + ", x = "
                                  + format_point(z),
                              sample);
    }
    return value;
}

void draw_row(InputSpace const& space, RngStream& rng, std::span<double> out)
{
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = space[j].inverse_cdf(rng.uniform_open());
}

void validate(ModelFunction const& f, InputSpace const& space,
              EstimatorConfig const& cfg)
{
    if (f.dim() != space.dim())
    {
        throw ParameterError("model dimension " + std::to_string(f.dim())
                             + " does not match input space dimension "
                             + std::to_string(space.dim()));
    }
    if (cfg.n < 2)
    {
        throw ParameterError("sample size N must be at least 2");
    }
    if (cfg.workers < 1)
    {
        throw ParameterError("worker count must be at least 1");
    }
    if (!(cfg.ci_z > 0) || !std::isfinite(cfg.ci_z))
    {
        throw ParameterError("confidence multiplier must be positive");
    }
}

std::size_t effective_workers(ModelFunction const& f,
                              EstimatorConfig const& cfg)
{
    return f.concurrent() ? cfg.workers : 1;
}

std::size_t chunk_count(std::size_t n)
{
    return (n + samples_per_chunk - 1) / samples_per_chunk;
}

std::size_t chunk_length(std::size_t c, std::size_t n)
{
    return std::min(samples_per_chunk, n - c * samples_per_chunk);
}

struct Moments
{
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
};

// Sample means and the unbiased variance of each mean
Moments finalize(ChunkStats const& s, double z)
{
    auto const n = static_cast<double>(s.count);
    Moments m;
    for (std::size_t j = 0; j < s.sum.size(); ++j)
    {
        double const mean = s.sum[j] / n;
        double const var = s.m2[j] / (n * (n - 1));
        double const half = z * std::sqrt(var);
        m.mean.push_back(mean);
        m.variance.push_back(var);
        m.ci_low.push_back(mean - half);
        m.ci_high.push_back(mean + half);
    }
    return m;
}

double sum_in_order(std::vector<double> const& v)
{
    double s = 0;
    for (double x : v)
        s += x;
    return s;
}
}  // namespace

//---------------------------------------------------------------------------//
double pickfreeze_increment(double f_x, double f_minus, double f_plus)
{
    if (!std::isfinite(f_x) || !std::isfinite(f_minus)
        || !std::isfinite(f_plus))
    {
        throw EvaluationError("pick-freeze increment needs finite values");
    }
    return (f_x - (f_minus + f_plus) / 2) * (f_minus - f_plus);
}

//---------------------------------------------------------------------------//
ShapleyReport estimate_shapley_all(ModelFunction const& f,
                                   InputSpace const& space,
                                   EstimatorConfig const& cfg)
{
    validate(f, space, cfg);
    std::size_t const d = space.dim();
    std::size_t const n = cfg.n;
    auto const start_count = f.eval_count();

    auto work = [&](std::size_t c) {
        std::size_t const first = c * samples_per_chunk;
        std::size_t const count = chunk_length(c, n);
        RngStream rng(cfg.seed, c);

        std::vector<double> g(count * d, 0.0);
        std::vector<std::uint64_t> credits(d, 0);
        std::vector<double> x(d), y(d), z(d);
        CompensatedSum half_sq;
        for (std::size_t i = 0; i < count; ++i)
        {
            draw_row(space, rng, x);
            draw_row(space, rng, y);
            auto const perm = random_permutation(d, rng);

            std::size_t const sample = first + i;
            std::copy(x.begin(), x.end(), z.begin());
            double const fx = evaluate_at(f, z, sample);
            double f_minus = fx;
            for (std::size_t pos = 0; pos < d; ++pos)
            {
                std::size_t const j = perm[pos];
                z[j] = y[j];
                double const f_plus = evaluate_at(f, z, sample);
                g[i * d + j] = pickfreeze_increment(fx, f_minus, f_plus);
                ++credits[j];
                f_minus = f_plus;
            }
            // z == y here, so f_minus == f(y)
            half_sq.add((fx - f_minus) * (fx - f_minus) / 2);
        }
        return summarize(d, count, g, std::move(credits), half_sq.value());
    };

    auto const chunks = run_chunks<ChunkStats>(
        chunk_count(n), effective_workers(f, cfg), work);
    auto const total = reduce(chunks, 0, chunks.size());
    auto m = finalize(total, cfg.ci_z);

    ShapleyReport r;
    r.d = d;
    r.n = n;
    r.estimates = std::move(m.mean);
    r.variance_of_estimator = std::move(m.variance);
    r.ci_low = std::move(m.ci_low);
    r.ci_high = std::move(m.ci_high);
    r.sigma2_estimate = sum_in_order(r.estimates);
    r.half_square_mean = total.aux_sum / static_cast<double>(n);
    r.credits = total.credits;
    r.eval_count = f.eval_count() - start_count;
    r.seed = cfg.seed;
    return r;
}

//---------------------------------------------------------------------------//
ShapleyReport estimate_shapley_winding(ModelFunction const& f,
                                       InputSpace const& space,
                                       EstimatorConfig const& cfg,
                                       bool cyclic)
{
    validate(f, space, cfg);
    std::size_t const d = space.dim();
    std::size_t const n = cfg.n;
    std::size_t const num_points = cyclic ? n : n + 1;
    auto const start_count = f.eval_count();
    auto const workers = effective_workers(f, cfg);

    // Point p is row (p mod chunk) of block (p / chunk), drawn from stream 2b;
    // permutations of chunk c come from stream 2c + 1.
    auto block_points = [&](std::size_t block, std::size_t rows) {
        RngStream rng(cfg.seed, 2 * block);
        SampleMatrix pts(rows, d);
        for (std::size_t i = 0; i < rows; ++i)
            draw_row(space, rng, pts.row(i));
        return pts;
    };

    std::size_t const num_blocks = chunk_count(num_points);
    std::vector<double> base_values(num_points);
    run_chunks<int>(num_blocks, workers, [&](std::size_t b) {
        std::size_t const first = b * samples_per_chunk;
        std::size_t const rows = chunk_length(b, num_points);
        auto const pts = block_points(b, rows);
        for (std::size_t i = 0; i < rows; ++i)
            base_values[first + i] = evaluate_at(f, pts.row(i), first + i);
        return 0;
    });

    auto work = [&](std::size_t c) {
        std::size_t const first = c * samples_per_chunk;
        std::size_t const count = chunk_length(c, n);
        auto const pts = block_points(c, std::min(samples_per_chunk,
                                                  num_points - first));
        // Successor of the last sample in this chunk
        std::size_t const tail_index = (first + count) % num_points;
        auto const tail = block_points(tail_index / samples_per_chunk,
                                       tail_index % samples_per_chunk + 1);

        RngStream rng(cfg.seed, 2 * c + 1);
        std::vector<double> g(count * d, 0.0);
        std::vector<std::uint64_t> credits(d, 0);
        std::vector<double> z(d);
        CompensatedSum half_sq;
        for (std::size_t i = 0; i < count; ++i)
        {
            auto const perm = random_permutation(d, rng);
            std::size_t const sample = first + i;
            std::size_t const next = (sample + 1) % num_points;
            auto const x = pts.row(i);
            auto const y = (i + 1 < count) ? pts.row(i + 1)
                                           : tail.row(tail.rows() - 1);

            std::copy(x.begin(), x.end(), z.begin());
            double const fx = base_values[sample];
            double f_minus = fx;
            for (std::size_t pos = 0; pos < d; ++pos)
            {
                std::size_t const j = perm[pos];
                z[j] = y[j];
                // The final point of the walk is the next base point
                double const f_plus = (pos + 1 == d)
                                          ? base_values[next]
                                          : evaluate_at(f, z, sample);
                g[i * d + j] = pickfreeze_increment(fx, f_minus, f_plus);
                ++credits[j];
                f_minus = f_plus;
            }
            half_sq.add((fx - f_minus) * (fx - f_minus) / 2);
        }
        return summarize(d, count, g, std::move(credits), half_sq.value());
    };

    auto const chunks = run_chunks<ChunkStats>(chunk_count(n), workers, work);
    auto const total = reduce(chunks, 0, chunks.size());

    ShapleyReport r;
    r.d = d;
    r.n = n;
    for (std::size_t j = 0; j < d; ++j)
        r.estimates.push_back(total.sum[j] / static_cast<double>(n));
    r.sigma2_estimate = sum_in_order(r.estimates);
    r.half_square_mean = total.aux_sum / static_cast<double>(n);
    r.credits = total.credits;
    r.eval_count = f.eval_count() - start_count;
    r.seed = cfg.seed;
    return r;
}

//---------------------------------------------------------------------------//
EffectReport estimate_main_effects(ModelFunction const& f,
                                   InputSpace const& space,
                                   EstimatorConfig const& cfg)
{
    validate(f, space, cfg);
    std::size_t const d = space.dim();
    std::size_t const n = cfg.n;
    auto const start_count = f.eval_count();

    auto work = [&](std::size_t c) {
        std::size_t const first = c * samples_per_chunk;
        std::size_t const count = chunk_length(c, n);
        RngStream rng(cfg.seed, c);

        std::vector<double> h(count * d);
        std::vector<double> x(d), y(d), z(d);
        CompensatedSum half_sq;
        for (std::size_t i = 0; i < count; ++i)
        {
            draw_row(space, rng, x);
            draw_row(space, rng, y);
            std::size_t const sample = first + i;
            double const fx = evaluate_at(f, x, sample);
            double const fy = evaluate_at(f, y, sample);
            for (std::size_t j = 0; j < d; ++j)
            {
                std::copy(y.begin(), y.end(), z.begin());
                z[j] = x[j];
                double const fz = evaluate_at(f, z, sample);
                // f(x) f(x_j, y_-j) - f(x) f(y), paired per sample
                h[i * d + j] = fx * (fz - fy);
            }
            half_sq.add((fx - fy) * (fx - fy) / 2);
        }
        return summarize(d, count, h,
                         std::vector<std::uint64_t>(d, count),
                         half_sq.value());
    };

    auto const chunks = run_chunks<ChunkStats>(
        chunk_count(n), effective_workers(f, cfg), work);
    auto const total = reduce(chunks, 0, chunks.size());
    auto m = finalize(total, cfg.ci_z);

    EffectReport r;
    r.d = d;
    r.n = n;
    r.kind = EffectKind::main;
    r.values = std::move(m.mean);
    r.variance_of_estimator = std::move(m.variance);
    r.ci_low = std::move(m.ci_low);
    r.ci_high = std::move(m.ci_high);
    r.sigma2_estimate = total.aux_sum / static_cast<double>(n);
    r.eval_count = f.eval_count() - start_count;
    r.seed = cfg.seed;
    return r;
}

EffectReport estimate_total_effects(ModelFunction const& f,
                                    InputSpace const& space,
                                    EstimatorConfig const& cfg)
{
    validate(f, space, cfg);
    std::size_t const d = space.dim();
    std::size_t const n = cfg.n;
    auto const start_count = f.eval_count();

    auto work = [&](std::size_t c) {
        std::size_t const first = c * samples_per_chunk;
        std::size_t const count = chunk_length(c, n);
        RngStream rng(cfg.seed, c);

        std::vector<double> h(count * d);
        std::vector<double> x(d), y(d), z(d);
        for (std::size_t i = 0; i < count; ++i)
        {
            draw_row(space, rng, x);
            draw_row(space, rng, y);
            std::size_t const sample = first + i;
            double const fx = evaluate_at(f, x, sample);
            for (std::size_t j = 0; j < d; ++j)
            {
                std::copy(x.begin(), x.end(), z.begin());
                z[j] = y[j];
                double const diff = fx - evaluate_at(f, z, sample);
                h[i * d + j] = diff * diff / 2;
            }
        }
        return summarize(d, count, h,
                         std::vector<std::uint64_t>(d, count), 0.0);
    };

    auto const chunks = run_chunks<ChunkStats>(
        chunk_count(n), effective_workers(f, cfg), work);
    auto const total = reduce(chunks, 0, chunks.size());
    auto m = finalize(total, cfg.ci_z);

    EffectReport r;
    r.d = d;
    r.n = n;
    r.kind = EffectKind::total;
    r.values = std::move(m.mean);
    r.variance_of_estimator = std::move(m.variance);
    r.ci_low = std::move(m.ci_low);
    r.ci_high = std::move(m.ci_high);
    r.eval_count = f.eval_count() - start_count;
    r.seed = cfg.seed;
    return r;
}

}  // namespace shapley
