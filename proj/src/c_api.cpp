#include "nsc/nsc.h"

#include <cmath>
#include <new>
#include <string>

#include "nsc/asynchrony.hpp"
#include "nsc/error.hpp"
#include "nsc/fsc.hpp"
#include "nsc/io.hpp"
#include "nsc/sim.hpp"
#include "nsc/stats.hpp"

struct nsc_meta {
    nsc::Metadata items;
};

struct nsc_dataset {
    nsc::Dataset data;
};

struct nsc_simulation {
    nsc_dataset data;
    nsc::Truth truth;
};

struct nsc_curve {
    nsc::KCurve curve;
};

struct nsc_budget {
    nsc::Budget budget;
};

namespace {

thread_local std::string last_error;

nsc_status status_of(nsc::ErrorKind kind)
{
    return static_cast<nsc_status>(static_cast<int>(kind) + 1);
}

template <class F>
nsc_status guarded(F&& f)
{
    try {
        f();
        last_error.clear();
        return NSC_OK;
    } catch (const nsc::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return NSC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return NSC_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    if (!p) {
        throw nsc::Error(nsc::ErrorKind::invalid_argument, std::string(what) + " must not be null");
    }
}

nsc::Metadata meta_of(const nsc_meta* meta)
{
    return meta ? meta->items : nsc::Metadata{};
}

nsc::CurveOptions curve_options(const nsc_curve_options* o, const char* y, const char* x)
{
    const nsc_curve_options d = o ? *o : nsc_curve_options_default();
    nsc::CurveOptions opt;
    switch (d.style) {
    case NSC_STYLE_NORMAL: opt.style = nsc::Style::normal; break;
    case NSC_STYLE_OVERLAP: opt.style = nsc::Style::overlap; break;
    default: throw nsc::Error(nsc::ErrorKind::invalid_argument, "unknown style");
    }
    switch (d.variant) {
    case NSC_VARIANT_NSC: opt.variant = nsc::Variant::nsc; break;
    case NSC_VARIANT_NSC_D: opt.variant = nsc::Variant::nsc_d; break;
    default: throw nsc::Error(nsc::ErrorKind::invalid_argument, "unknown variant");
    }
    switch (d.noise) {
    case NSC_NOISE_AUTO: break;
    case NSC_NOISE_WFN: opt.noise_kind = nsc::NoiseKind::wfn; break;
    case NSC_NOISE_FFN: opt.noise_kind = nsc::NoiseKind::ffn; break;
    case NSC_NOISE_RWN: opt.noise_kind = nsc::NoiseKind::rwn; break;
    default: throw nsc::Error(nsc::ErrorKind::invalid_argument, "unknown noise kind");
    }
    opt.y_name = y;
    opt.x_name = x;
    return opt;
}

nsc_simulation* wrap(const nsc::Simulation& sim)
{
    auto* out = new nsc_simulation;
    out->data.data.tau0 = sim.truth.tau0;
    out->data.data.names.push_back("y");
    out->data.data.columns.emplace_back(sim.y.values().begin(), sim.y.values().end());
    for (std::size_t i = 0; i < sim.x.size(); ++i) {
        out->data.data.names.push_back(sim.truth.effects[i].name);
        out->data.data.columns.emplace_back(sim.x[i].values().begin(), sim.x[i].values().end());
    }
    out->truth = sim.truth;
    return out;
}

} // namespace

extern "C" {

const char* nsc_status_name(nsc_status status)
{
    if (status == NSC_OK) {
        return "ok";
    }
    if (status > NSC_OK && status < NSC_ERR_INTERNAL) {
        return nsc::to_string(static_cast<nsc::ErrorKind>(static_cast<int>(status) - 1)).data();
    }
    return "internal";
}

const char* nsc_last_error(void)
{
    return last_error.c_str();
}

const char* nsc_version(void)
{
    return nsc::version().data();
}

nsc_meta* nsc_meta_new(void)
{
    return new (std::nothrow) nsc_meta;
}

nsc_status nsc_meta_add(nsc_meta* meta, const char* key, const char* value)
{
    return guarded([&] {
        need(meta, "meta");
        need(key, "key");
        need(value, "value");
        meta->items.emplace_back(key, value);
    });
}

void nsc_meta_free(nsc_meta* meta)
{
    delete meta;
}

nsc_status nsc_dataset_read_csv(const char* path, double tau0_override, nsc_dataset** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        std::optional<double> tau0;
        if (tau0_override > 0.0) {
            tau0 = tau0_override;
        }
        *out = new nsc_dataset{nsc::read_csv(path, tau0)};
    });
}

nsc_status nsc_dataset_write_csv(const nsc_dataset* data, const char* path, const nsc_meta* meta)
{
    return guarded([&] {
        need(data, "data");
        need(path, "path");
        nsc::write_csv(data->data, path, meta_of(meta));
    });
}

size_t nsc_dataset_rows(const nsc_dataset* data)
{
    return data ? data->data.rows() : 0;
}

size_t nsc_dataset_columns(const nsc_dataset* data)
{
    return data ? data->data.names.size() : 0;
}

const char* nsc_dataset_column_name(const nsc_dataset* data, size_t index)
{
    if (!data || index >= data->data.names.size()) {
        return nullptr;
    }
    return data->data.names[index].c_str();
}

double nsc_dataset_tau0(const nsc_dataset* data)
{
    return data ? data->data.tau0 : 0.0;
}

nsc_status nsc_dataset_column(const nsc_dataset* data, const char* name, const double** values,
                              size_t* count)
{
    return guarded([&] {
        need(data, "data");
        need(name, "name");
        need(values, "values");
        need(count, "count");
        const auto& col = data->data.column(name);
        *values = col.data();
        *count = col.size();
    });
}

const char* nsc_dataset_meta(const nsc_dataset* data, const char* key)
{
    if (!data || !key) {
        return nullptr;
    }
    for (const auto& [k, v] : data->data.metadata) {
        if (k == key) {
            return v.c_str();
        }
    }
    return nullptr;
}

void nsc_dataset_free(nsc_dataset* data)
{
    delete data;
}

nsc_status nsc_simulate_preset(const char* name, double scale, uint64_t seed, nsc_simulation** out)
{
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        *out = nullptr;
        *out = wrap(nsc::simulate(nsc::preset(name, scale, seed)));
    });
}

nsc_status nsc_simulate_config(const char* path, nsc_simulation** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = wrap(nsc::simulate(nsc::read_scenario(path)));
    });
}

const nsc_dataset* nsc_simulation_data(const nsc_simulation* sim)
{
    return sim ? &sim->data : nullptr;
}

uint64_t nsc_simulation_seed(const nsc_simulation* sim)
{
    return sim ? sim->truth.seed : 0;
}

nsc_status nsc_simulation_write_truth(const nsc_simulation* sim, const char* path, const nsc_meta* meta)
{
    return guarded([&] {
        need(sim, "sim");
        need(path, "path");
        nsc::write_truth(sim->truth, path, meta_of(meta));
    });
}

void nsc_simulation_free(nsc_simulation* sim)
{
    delete sim;
}

nsc_status nsc_adev_table(const double* values, size_t n, nsc_style style, size_t* factors, double* adev,
                          size_t capacity, size_t* count)
{
    return guarded([&] {
        need(values, "values");
        need(count, "count");
        const nsc::TimeSeries s(std::vector<double>(values, values + n), 1.0);
        const nsc::TauGrid grid = nsc::TauGrid::standard(n);
        if (grid.empty()) {
            throw nsc::Error(nsc::ErrorKind::insufficient_data, "series too short for any averaging factor");
        }
        if (capacity < grid.size() || !factors || !adev) {
            *count = grid.size();
            throw nsc::Error(nsc::ErrorKind::range,
                             "output arrays need room for " + std::to_string(grid.size()) + " rows");
        }
        std::size_t i = 0;
        for (const std::size_t m : grid.factors()) {
            const double v = style == NSC_STYLE_NORMAL ? nsc::adev2(nsc::block_average(s, m))
                                                       : nsc::overlap_adev2(s, m);
            factors[i] = m;
            adev[i] = std::sqrt(v);
            ++i;
        }
        *count = i;
    });
}

nsc_curve_options nsc_curve_options_default(void)
{
    return {NSC_STYLE_OVERLAP, NSC_VARIANT_NSC, NSC_NOISE_AUTO};
}

nsc_status nsc_kcurve(const nsc_dataset* data, const char* y, const char* x, const nsc_curve_options* options,
                      nsc_curve** out)
{
    return guarded([&] {
        need(data, "data");
        need(y, "y");
        need(x, "x");
        need(out, "out");
        *out = nullptr;
        const nsc::CurveOptions opt = curve_options(options, y, x);
        *out = new nsc_curve{nsc::k_curve(data->data.series(y), data->data.series(x), opt)};
    });
}

nsc_status nsc_curve_read(const char* path, nsc_curve** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new nsc_curve{nsc::read_curve(path)};
    });
}

nsc_status nsc_curve_write(const nsc_curve* curve, const char* path, const nsc_meta* meta)
{
    return guarded([&] {
        need(curve, "curve");
        need(path, "path");
        nsc::write_curve(curve->curve, path, meta_of(meta));
    });
}

size_t nsc_curve_size(const nsc_curve* curve)
{
    return curve ? curve->curve.points.size() : 0;
}

size_t nsc_curve_omitted(const nsc_curve* curve)
{
    return curve ? curve->curve.omitted.size() : 0;
}

nsc_status nsc_curve_point_at(const nsc_curve* curve, size_t index, nsc_curve_point* out)
{
    return guarded([&] {
        need(curve, "curve");
        need(out, "out");
        if (index >= curve->curve.points.size()) {
            throw nsc::Error(nsc::ErrorKind::range, "curve point index out of range");
        }
        const auto& p = curve->curve.points[index];
        *out = {p.m, p.tau, p.k, p.sigma_k, p.edf};
    });
}

nsc_noise nsc_curve_noise(const nsc_curve* curve)
{
    if (!curve || !curve->curve.noise_kind) {
        return NSC_NOISE_AUTO;
    }
    return static_cast<nsc_noise>(static_cast<int>(*curve->curve.noise_kind));
}

void nsc_curve_free(nsc_curve* curve)
{
    delete curve;
}

nsc_compensation nsc_compensation_default(void)
{
    const nsc::CompensationOptions d;
    nsc_compensation c{};
    c.delay_min = d.delay_min;
    c.delay_max = d.delay_max;
    c.integral_min = d.integral_min;
    c.integral_max = d.integral_max;
    c.integral = 1;
    return c;
}

nsc_status nsc_compensate(const nsc_dataset* data, const char* y, const char* x, const nsc_curve_options* options,
                          nsc_compensation* search, nsc_curve** curve)
{
    return guarded([&] {
        need(data, "data");
        need(y, "y");
        need(x, "x");
        need(search, "search");
        if (curve) {
            *curve = nullptr;
        }
        nsc::CompensationOptions opt;
        opt.delay_min = search->delay_min;
        opt.delay_max = search->delay_max;
        opt.integral_min = search->integral_min;
        opt.integral_max = search->integral_max;
        opt.curve = curve_options(options, y, x);
        nsc::CompensationResult r = nsc::compensate(data->data.series(y), data->data.series(x), opt);
        search->delay = r.best.delay_steps;
        search->integral = r.best.integral_steps;
        search->score = r.score;
        search->evaluated = r.evaluated;
        search->degenerate = r.degenerate;
        if (curve) {
            *curve = new nsc_curve{std::move(r.curve)};
        }
    });
}

nsc_status nsc_extract(const nsc_curve* curve, nsc_estimate* out)
{
    return guarded([&] {
        need(curve, "curve");
        need(out, "out");
        try {
            const nsc::KEstimate e = nsc::extract_estimate(curve->curve);
            *out = {e.k_bar, e.sigma_bar, e.sigma_max, e.sigma_total, e.m_lo, e.m_hi, e.tau_lo, e.tau_hi, e.count};
        } catch (const nsc::ExtractionError& e) {
            std::string msg = e.what();
            if (e.best()) {
                msg += " (closest window m = " + std::to_string(e.best()->m_lo) + ".." +
                       std::to_string(e.best()->m_hi) + ", excess " + nsc::format_double(e.best()->violation) + ")";
            }
            throw nsc::Error(nsc::ErrorKind::extraction_failed, msg);
        }
    });
}

nsc_status nsc_budget_read(const char* path, nsc_budget** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new nsc_budget{nsc::budget(nsc::read_budget(path))};
    });
}

nsc_status nsc_budget_parse(const char* text, nsc_budget** out)
{
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = nullptr;
        *out = new nsc_budget{nsc::budget(nsc::parse_budget(text))};
    });
}

size_t nsc_budget_size(const nsc_budget* budget)
{
    return budget ? budget->budget.entries.size() : 0;
}

nsc_status nsc_budget_entry(const nsc_budget* budget, size_t index, const char** name, double* k,
                            double* sigma_x, double* contribution)
{
    return guarded([&] {
        need(budget, "budget");
        if (index >= budget->budget.entries.size()) {
            throw nsc::Error(nsc::ErrorKind::range, "budget entry index out of range");
        }
        const auto& e = budget->budget.entries[index];
        if (name) {
            *name = e.name.c_str();
        }
        if (k) {
            *k = e.k;
        }
        if (sigma_x) {
            *sigma_x = e.sigma_x;
        }
        if (contribution) {
            *contribution = e.contribution();
        }
    });
}

double nsc_budget_u_b(const nsc_budget* budget)
{
    return budget ? budget->budget.u_b : 0.0;
}

void nsc_budget_free(nsc_budget* budget)
{
    delete budget;
}

} // extern "C"
