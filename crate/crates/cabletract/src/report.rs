//! Builds the tables and figure-data files for each subcommand.
//!
//! Nothing here writes to disk; every function returns the outputs in a
//! fixed order so a run is reproducible byte for byte.

use rayon::prelude::*;

use crate::climate::{bundled_sites, month_of_day, synthesize_year, HourlyWeather, SiteClimate};
use crate::compaction::{self, DEFAULT_PASSES};
use crate::draft::{self, Library, Soil};
use crate::econ::{self, CarbonData, DieselBaseline};
use crate::envelope;
use crate::error::{Error, Result};
use crate::fields::{corpus_geojson, find_field, generate_corpus, FieldClass, FieldPolygon, Pt};
use crate::output::{Output, Payload, RunContext, Table};
use crate::physics::{self, AnchorEnvelope, DrivetrainChain};
use crate::planner::{self, StripPlan};
use crate::powersim::{self, Battery, DutyCycle, HourlyLedger, PowerPlant};
use crate::row;
use crate::scenario::{energy_per_decare, run_single, ScenarioParams};
use crate::stats::{median, percentile};
use crate::uq;
use crate::variants;

/// Fields drawn in the strip-plan and compaction figures.
pub const EXAMPLE_FIELDS: [&str; 3] = ["field_001", "field_011", "field_031"];
pub const SAG_SPANS_M: [f64; 3] = [25.0, 50.0, 100.0];
pub const ENVELOPE_FARM_HA: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UqMode {
    Sobol,
    Mc,
    Tornado,
}

fn fig(n: u32, t: Table) -> Output {
    Output::csv(format!("figdata/F{n}.csv"), t)
}

fn tab(name: &str, t: Table) -> Output {
    Output::csv(format!("tables/{name}.csv"), t)
}

// ---------------------------------------------------------------- physics

pub fn physics(ctx: &RunContext) -> Result<Vec<Output>> {
    let p = &ctx.params;
    let base = DrivetrainChain::baseline();
    let prem = DrivetrainChain::premium();

    let mut chain = Table::new(&["stage", "baseline", "premium"]);
    let stages = ["motor", "inverter", "gearbox", "drum", "pulley", "cable"];
    for (i, s) in stages.iter().enumerate() {
        chain.push(row![s, base.components()[i], prem.components()[i]]);
    }
    chain.push(row!["product", physics::chain_efficiency(&base), physics::chain_efficiency(&prem)]);

    let mut motor = Table::new(&["preset", "efficiency", "speed_kmh", "continuous_draft_N", "peak_draft_N", "continuous_W", "peak_W"]);
    let presets = [
        ("scenario", p.drivetrain_efficiency),
        ("baseline", physics::chain_efficiency(&base)),
        ("premium", physics::chain_efficiency(&prem)),
    ];
    for (name, eta) in presets {
        motor.push(row![
            name,
            eta,
            p.operating_speed_kmh,
            p.draft_load_n,
            physics::REFERENCE_PEAK_DRAFT_N,
            physics::motor_power(p.draft_load_n, p.operating_speed_kmh, eta)?,
            physics::motor_power(physics::REFERENCE_PEAK_DRAFT_N, p.operating_speed_kmh, eta)?
        ]);
    }

    let mut anchor = Table::new(&["reaction_N", "per_auger_capacity_N", "safety_factor", "augers"]);
    for (r, c) in [(1800.0, 400.0), (3000.0, 400.0), (14000.0, 400.0), (7250.0, 2000.0)] {
        anchor.push(row![r, c, 1.15, physics::augers_required(r, c, 1.15)]);
    }

    let cables = physics::bundled_cables();
    let mut tension = Table::new(&["cable", "span_m", "draft_N", "regime", "main_tension_N", "midspan_sag_m"]);
    for c in &cables {
        let b = physics::tension_balance(p.draft_load_n, c, p.span_m, physics::PULLEY_HEIGHT_M, physics::CLEARANCE_MIN_M)?;
        let regime = match b.regime {
            physics::TensionRegime::DraftBound => "draft_bound",
            physics::TensionRegime::SagBound => "sag_bound",
        };
        let sag = physics::catenary_sag_exact(c.linear_weight_n_per_m, p.span_m, b.main_tension_n)?;
        tension.push(row![c.name, p.span_m, p.draft_load_n, regime, b.main_tension_n, sag]);
    }

    let mut f1 = Table::new(&["cable", "span_m", "tension_N", "sag_exact_m", "sag_parabolic_m"]);
    for c in &cables {
        for span in SAG_SPANS_M {
            for t in envelope::logspace(200.0, 50_000.0, 80) {
                let w = c.linear_weight_n_per_m;
                f1.push(row![c.name, span, t, physics::catenary_sag_exact(w, span, t)?, physics::catenary_sag_parabolic(w, span, t)?]);
            }
        }
    }

    let loose = AnchorEnvelope::loose_sand();
    let dense = AnchorEnvelope::medium_dense();
    let mut f2 = Table::new(&["reaction_N", "augers_loose_sand", "augers_medium_dense", "ceiling_loose_sand_N", "ceiling_medium_dense_N"]);
    for k in 0..=60 {
        let r = 250.0 * k as f64;
        f2.push(row![r, loose.required(r), dense.required(r), loose.ceiling_n(), dense.ceiling_n()]);
    }

    let all = draft::bundled_implements();
    let cod = draft::library(&all, Library::Codesigned);
    let dists = cod
        .par_iter()
        .map(|imp| draft::sample_draft(imp, Soil::Medium, draft::DEFAULT_SAMPLES, ctx.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut f3 = Table::new(&["implement", "preset", "efficiency", "continuous_W", "peak_W"]);
    for d in &dists {
        for (name, c) in [("baseline", &base), ("premium", &prem)] {
            let eta = physics::chain_efficiency(c);
            f3.push(row![
                d.implement,
                name,
                eta,
                physics::motor_power(d.p50_n, p.operating_speed_kmh, eta)?,
                physics::motor_power(d.p90_n, p.operating_speed_kmh, eta)?
            ]);
        }
    }

    Ok(vec![
        tab("drivetrain_chain", chain),
        tab("motor_sizing", motor),
        tab("anchor_sizing", anchor),
        tab("tension_balance", tension),
        fig(1, f1),
        fig(2, f2),
        fig(3, f3),
    ])
}

// ------------------------------------------------------------------ draft

pub fn draft(ctx: &RunContext) -> Result<Vec<Output>> {
    let all = draft::bundled_implements();
    let conv = draft::library(&all, Library::Conventional);
    let cod = draft::library(&all, Library::Codesigned);
    let rep = draft::library_reduction_report(&conv, &cod, Soil::Medium, draft::DEFAULT_SAMPLES, ctx.seed)?;

    let mut t = Table::new(&[
        "operation", "conventional", "conventional_p10_N", "conventional_p50_N", "conventional_p90_N",
        "codesigned", "codesigned_p10_N", "codesigned_p50_N", "codesigned_p90_N", "p50_ratio",
    ]);
    for r in &rep.rows {
        let op = format!("{:?}", r.class);
        t.push(row![
            op,
            r.conventional.implement, r.conventional.p10_n, r.conventional.p50_n, r.conventional.p90_n,
            r.codesigned.implement, r.codesigned.p10_n, r.codesigned.p50_n, r.codesigned.p90_n,
            r.ratio
        ]);
    }
    t.push(row!["median", "", "", "", "", "", "", "", "", rep.median_ratio]);

    let mut f4 = Table::new(&["implement", "sample", "draft_N"]);
    for imp in &cod {
        for (i, d) in draft::draft_samples(imp, Soil::Medium, draft::DEFAULT_SAMPLES, ctx.seed)?.iter().enumerate() {
            f4.push(row![imp.name, i, *d]);
        }
    }

    let mut f5 = Table::new(&["implement", "speed_kmh", "depth_cm", "draft_N"]);
    for name in draft::SPEED_CURVE_IMPLEMENTS {
        let imp = draft::find(&all, name)?;
        for k in 0..=38 {
            let v = 0.5 + 0.25 * k as f64;
            f5.push(row![name, v, draft::SPEED_CURVE_DEPTH_CM, draft::d497_draft(imp, v, draft::SPEED_CURVE_DEPTH_CM, Soil::Medium)?]);
        }
    }
    Ok(vec![tab("draft_library", t), fig(4, f4), fig(5, f5)])
}

// ----------------------------------------------------------------- energy

pub fn plant_for(p: &ScenarioParams) -> (PowerPlant, Battery, DutyCycle) {
    let plant = PowerPlant {
        pv_area_m2: p.pv_area_m2,
        wind_rated_w: p.wind_rated_w,
        ..Default::default()
    };
    let battery = Battery {
        capacity_kwh: p.battery_kwh,
        soc_min: p.soc_min,
        soc_max: p.soc_max,
        ..Default::default()
    };
    let duty = DutyCycle {
        idle_w: p.idle_power_w,
        ..Default::default()
    };
    (plant, battery, duty)
}

pub struct SiteRun {
    pub site: SiteClimate,
    pub weather: HourlyWeather,
    pub ledger: HourlyLedger,
}

pub fn simulate_sites(ctx: &RunContext, sites: &[SiteClimate]) -> Result<Vec<SiteRun>> {
    let (plant, battery, duty) = plant_for(&ctx.params);
    sites
        .par_iter()
        .map(|s| {
            let weather = synthesize_year(s, ctx.seed)?;
            let ledger = powersim::simulate_year(&weather, &plant, &battery, &duty)?;
            Ok(SiteRun {
                site: s.clone(),
                weather,
                ledger,
            })
        })
        .collect()
}

pub fn resolve_sites(name: Option<&str>) -> Result<Vec<SiteClimate>> {
    match name {
        None => Ok(bundled_sites()),
        Some(n) => Ok(vec![crate::climate::bundled_site(n)?]),
    }
}

pub fn energy(ctx: &RunContext, sites: &[SiteClimate]) -> Result<Vec<Output>> {
    let p = &ctx.params;
    let e_dec = energy_per_decare(p)?;
    let runs = simulate_sites(ctx, sites)?;
    let (plant, battery, duty) = plant_for(p);
    let (areas, caps) = powersim::default_sweep();
    let maps = runs
        .iter()
        .map(|r| powersim::feasibility_map(&r.weather, &plant, &battery, &duty, &areas, &caps))
        .collect::<Result<Vec<_>>>()?;

    let mut sites_t = Table::new(&[
        "site", "lat_deg", "published_ghi_kwh_m2", "synthesized_ghi_kwh_m2", "deviation_pct",
        "pv_kwh", "wind_kwh", "load_kwh", "grid_kwh", "grid_hours", "pv_yield_alpha",
    ]);
    let mut cov_t = Table::new(&["site", "p10_dec_per_day", "p50_dec_per_day", "p90_dec_per_day"]);
    let mut week_t = Table::new(&["site", "brightest_week_start_day", "grid_import_wh"]);
    let mut feas_t = Table::new(&["site", "reference_grid_hours", "min_grid_hours", "min_at_pv_m2", "min_at_battery_kwh"]);
    let mut f6 = Table::new(&["site", "day", "month", "decares"]);
    let mut f7 = Table::new(&["site", "day", "hour", "soc", "pv_w", "wind_w", "load_w", "grid_w"]);
    let mut outputs = Vec::new();

    for (r, map) in runs.iter().zip(&maps) {
        let name = &r.site.name;
        let ghi = r.weather.annual_ghi_kwh_m2();
        let l = &r.ledger;
        sites_t.push(row![
            name, r.site.lat_deg, r.site.published_ghi, ghi, (ghi / r.site.published_ghi - 1.0) * 100.0,
            l.pv_kwh(), l.wind_kwh(), l.load_kwh(), l.grid_kwh(), l.grid_hours(),
            l.pv_kwh() / (plant.pv_area_m2 * ghi)
        ]);
        let cov = powersim::daily_coverage_stats(l, e_dec)?;
        cov_t.push(row![name, cov.p10, cov.p50, cov.p90]);
        for (d, v) in cov.per_day_decares.iter().enumerate() {
            f6.push(row![name, d, month_of_day(d) + 1, *v]);
        }
        let start = powersim::brightest_week_start(&r.weather);
        week_t.push(row![name, start, powersim::grid_import_wh(l, start, 7)]);
        for h in start * 24..(start + 7) * 24 {
            f7.push(row![name, h / 24, h % 24, l.soc[h], l.pv_w[h], l.wind_w[h], l.load_w[h], l.grid_w[h]]);
        }
        let best = map
            .iter()
            .min_by(|a, b| a.grid_hours.cmp(&b.grid_hours).then(a.grid_kwh.total_cmp(&b.grid_kwh)))
            .expect("non-empty sweep");
        feas_t.push(row![name, l.grid_hours(), best.grid_hours, best.pv_area_m2, best.battery_kwh]);
        let mut body = Vec::new();
        l.write_csv(&mut body)?;
        outputs.push(Output {
            path: format!("tables/ledger_{name}.csv"),
            payload: Payload::RawCsv(body),
        });
    }

    // best, median and worst resource by published GHI
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|a, b| runs[*b].site.published_ghi.total_cmp(&runs[*a].site.published_ghi));
    let picks: Vec<(&str, usize)> = if order.len() >= 3 {
        vec![("best", order[0]), ("median", order[(order.len() - 1) / 2]), ("worst", order[order.len() - 1])]
    } else {
        order.iter().map(|i| ("selected", *i)).collect()
    };
    let mut f8 = Table::new(&["site", "rank", "pv_area_m2", "battery_kwh", "grid_hours", "grid_kwh", "reference_pv_m2", "reference_battery_kwh"]);
    for (rank, i) in picks {
        for c in &maps[i] {
            f8.push(row![runs[i].site.name, rank, c.pv_area_m2, c.battery_kwh, c.grid_hours, c.grid_kwh, p.pv_area_m2, p.battery_kwh]);
        }
    }

    let mut out = vec![
        tab("sites", sites_t),
        tab("coverage_stats", cov_t),
        tab("brightest_week", week_t),
        tab("feasibility_min", feas_t),
    ];
    out.extend(outputs);
    out.extend([fig(6, f6), fig(7, f7), fig(8, f8)]);
    Ok(out)
}

// ------------------------------------------------------------------- plan

pub fn corpus_and_plans(ctx: &RunContext) -> Result<(Vec<FieldPolygon>, Vec<StripPlan>)> {
    let p = &ctx.params;
    let corpus = generate_corpus(ctx.seed, p.span_m)?;
    let plans = planner::plan_corpus(&corpus, p.span_m, p.strip_width_m)?;
    Ok((corpus, plans))
}

fn plan_row_table() -> Table {
    Table::new(&["field_id", "class", "area_ha", "orientation_deg", "eta", "strips", "anchor_placements", "rounds", "swept_area_m2"])
}

fn push_plan_row(t: &mut Table, f: &FieldPolygon, pl: &StripPlan) {
    t.push(row![f.id, f.class.as_str(), f.area_ha(), pl.orientation_deg, pl.eta, pl.strips.len(), pl.anchor_placements, pl.rounds(), pl.swept_area_m2]);
}

fn push_ring(t: &mut Table, id: &str, kind: &str, part: usize, ring: &[Pt]) {
    for (i, [x, y]) in ring.iter().enumerate() {
        t.push(row![id, kind, part, i, *x, *y]);
    }
}

fn geometry_table(fields: &[(&FieldPolygon, &StripPlan)], path_kind: &str) -> Table {
    let mut t = Table::new(&["field_id", "kind", "part", "vertex", "x_m", "y_m"]);
    for (f, pl) in fields {
        push_ring(&mut t, &f.id, "outline", 0, &f.outer);
        for (k, h) in f.holes.iter().enumerate() {
            push_ring(&mut t, &f.id, "hole", k, h);
        }
        for (k, seg) in pl.midlines().iter().enumerate() {
            push_ring(&mut t, &f.id, path_kind, k, seg);
        }
    }
    t
}

pub fn plan(ctx: &RunContext, field: Option<&str>) -> Result<Vec<Output>> {
    let p = &ctx.params;
    if let Some(id) = field {
        let corpus = generate_corpus(ctx.seed, p.span_m)?;
        let f = find_field(&corpus, id)?;
        let pl = planner::best_orientation(f, p.span_m, p.strip_width_m)?;
        let mut t = plan_row_table();
        push_plan_row(&mut t, f, &pl);
        return Ok(vec![
            tab(&format!("plan_{id}"), t),
            Output {
                path: format!("geometry/plan_{id}.geojson"),
                payload: Payload::Json(pl.pieces_geojson()),
            },
        ]);
    }

    let (corpus, plans) = corpus_and_plans(ctx)?;
    let mut corpus_t = Table::new(&["field_id", "class", "area_ha", "holes", "vertices"]);
    let mut eff_t = plan_row_table();
    let mut f9 = Table::new(&["field_id", "class", "eta"]);
    for (f, pl) in corpus.iter().zip(&plans) {
        corpus_t.push(row![f.id, f.class.as_str(), f.area_ha(), f.holes.len(), f.outer.len()]);
        push_plan_row(&mut eff_t, f, pl);
        f9.push(row![f.id, f.class.as_str(), pl.eta]);
    }

    let mut cls_t = Table::new(&["class", "fields", "median_eta", "p10_eta", "p90_eta"]);
    for c in FieldClass::ALL {
        let e: Vec<f64> = corpus.iter().zip(&plans).filter(|(f, _)| f.class == c).map(|(_, pl)| pl.eta).collect();
        if !e.is_empty() {
            cls_t.push(row![c.as_str(), e.len(), median(&e), percentile(&e, 10.0), percentile(&e, 90.0)]);
        }
    }
    let all_eta: Vec<f64> = plans.iter().map(|pl| pl.eta).collect();
    cls_t.push(row!["all", all_eta.len(), median(&all_eta), percentile(&all_eta, 10.0), percentile(&all_eta, 90.0)]);

    let farm = planner::reference_farm(&corpus)?;
    let budget = planner::farm_time_budget(&farm, p)?;
    let farm_ha: f64 = farm.iter().map(|f| f.field.area_ha()).sum();
    let mut tb = Table::new(&["component", "hours", "share"]);
    for (k, v) in [("operating", budget.operating_h), ("setup", budget.setup_h), ("travel", budget.travel_h)] {
        tb.push(row![k, v, v / budget.total_h()]);
    }
    tb.push(row!["total", budget.total_h(), 1.0]);
    let mut farm_t = Table::new(&["field_id", "area_ha", "offset_x_m", "offset_y_m"]);
    for f in &farm {
        farm_t.push(row![f.field.id, f.field.area_ha(), f.offset[0], f.offset[1]]);
    }
    farm_t.push(row!["total", farm_ha, "", ""]);

    let examples = EXAMPLE_FIELDS
        .iter()
        .map(|id| {
            let i = corpus.iter().position(|f| f.id == *id).ok_or_else(|| Error::Unknown { kind: "field", name: id.to_string() })?;
            Ok((&corpus[i], &plans[i]))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(vec![
        tab("corpus", corpus_t),
        tab("shape_efficiency", eff_t),
        tab("eta_classes", cls_t),
        tab("farm", farm_t),
        tab("time_budget", tb.clone()),
        Output {
            path: "geometry/corpus.geojson".to_string(),
            payload: Payload::Json(corpus_geojson(&corpus)),
        },
        fig(9, f9),
        fig(10, geometry_table(&examples, "cable")),
        fig(11, tb),
    ])
}

// ------------------------------------------------------------- compaction

pub fn compaction(ctx: &RunContext) -> Result<Vec<Output>> {
    let (corpus, plans) = corpus_and_plans(ctx)?;
    let mut press = Table::new(&["vehicle", "mass_kg", "mean_pressure_kpa", "max_pressure_kpa", "track_width_m", "index_per_pass"]);
    for v in compaction::bundled_vehicles() {
        press.push(row![v.name, v.total_mass_kg, v.mean_pressure_kpa(), v.max_pressure_kpa(), v.track_width_m(), v.index_per_pass()]);
    }
    let reports = corpus
        .par_iter()
        .zip(plans.par_iter())
        .map(|(f, pl)| compaction::compare(f, pl, DEFAULT_PASSES))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "field_id", "class", "passes", "tractor_compacted_fraction", "carriage_compacted_fraction",
        "tractor_compacted_m2", "carriage_compacted_m2", "tractor_index", "carriage_index",
        "area_reduction", "energy_index_reduction",
    ]);
    for r in &reports {
        t.push(row![
            r.field_id, r.class, DEFAULT_PASSES, r.tractor.compacted_fraction, r.carriage.compacted_fraction,
            r.tractor.compacted_area_m2, r.carriage.compacted_area_m2, r.tractor.contact_energy_index,
            r.carriage.contact_energy_index, r.area_reduction, r.energy_index_reduction
        ]);
    }
    let examples: Vec<(&FieldPolygon, &StripPlan)> = corpus
        .iter()
        .zip(&plans)
        .filter(|(f, _)| EXAMPLE_FIELDS.contains(&f.id.as_str()))
        .collect();
    Ok(vec![
        tab("contact_pressures", press),
        tab("compaction", t),
        fig(12, geometry_table(&examples, "carriage_path")),
    ])
}

// ------------------------------------------------------------------- econ

pub fn econ(ctx: &RunContext) -> Result<Vec<Output>> {
    let p = &ctx.params;
    let base = DieselBaseline::default();

    let mut params_t = Table::new(&["item", "value", "unit"]);
    for c in &p.capex_items {
        params_t.push(row![format!("capex.{}", c.name), c.cents as f64 / 100.0, "EUR"]);
    }
    for (k, v, u) in [
        ("capex_total", p.capex_eur(), "EUR"),
        ("maintenance_frac_per_yr", p.maintenance_frac_per_yr, "-"),
        ("battery_replacement_yr", p.battery_replacement_yr as f64, "yr"),
        ("horizon_yr", p.horizon_yr as f64, "yr"),
        ("discount_rate", p.discount_rate, "-"),
        ("diesel_l_per_decare", p.diesel_l_per_decare, "L"),
        ("diesel_price_eur_per_l", p.diesel_price_eur_per_l, "EUR/L"),
        ("grid_price_eur_per_kWh", p.grid_price_eur_per_kwh, "EUR/kWh"),
        ("diesel_tractor_capex", base.capex_eur, "EUR"),
        ("diesel_maintenance_frac_per_yr_fitted", base.maintenance_frac_per_yr, "-"),
        ("reference_ghi", base.reference_ghi_kwh_m2, "kWh/m2"),
    ] {
        params_t.push(row![k, v, u]);
    }

    let sweep = econ::farm_size_sweep(p, &econ::FARM_SIZES_HA, &econ::DISCOUNT_RATES)?;
    let mut npv_t = Table::new(&["farm_ha", "npv_5pct_eur", "npv_8pct_eur", "npv_12pct_eur", "payback_8pct_yr"]);
    for r in &sweep {
        npv_t.push(row![r.farm_ha, r.npv_eur[0], r.npv_eur[1], r.npv_eur[2], r.payback_yr_at_8pct]);
    }

    let carbon = CarbonData::bundled();
    let lca = econ::lifecycle_co2_with(p, &carbon, ENVELOPE_FARM_HA)?;
    let mut lca_t = Table::new(&["vehicle", "embodied_kg_per_ha_yr", "operational_kg_per_ha_yr", "total_kg_per_ha_yr"]);
    for r in &lca.rows {
        lca_t.push(row![r.vehicle, r.embodied_kg_per_ha_yr, r.operational_kg_per_ha_yr, r.total_kg_per_ha_yr]);
    }
    let mut bom_t = Table::new(&["vehicle", "phase", "item", "intensity_key", "quantity", "kg_co2e_per_unit", "kg_co2e"]);
    for l in &carbon.bom {
        let k = carbon.intensity(&l.intensity_key)?;
        bom_t.push(row![l.vehicle, l.phase, l.item, l.intensity_key, l.quantity, k, k * l.quantity]);
    }

    let comp = competitors_table()?;

    let mut f16 = Table::new(&["farm_ha", "discount_rate", "npv_eur", "payback_yr"]);
    for ha in envelope::logspace(1.0, 100.0, 40) {
        for r in econ::DISCOUNT_RATES {
            let c = econ::npv_vs_diesel(p, ha, r)?;
            f16.push(row![ha, r, c.npv_eur, c.discounted_payback_yr]);
        }
    }
    let mut f17 = Table::new(&["vehicle", "component", "kg_per_ha_yr"]);
    for r in &lca.rows {
        f17.push(row![r.vehicle, "embodied", r.embodied_kg_per_ha_yr]);
        f17.push(row![r.vehicle, "operational", r.operational_kg_per_ha_yr]);
    }
    let cf = econ::npv_vs_diesel(p, ENVELOPE_FARM_HA, p.discount_rate)?;
    let mut f19 = Table::new(&["year", "net_savings_eur", "discounted_eur", "cumulative_discounted_eur"]);
    let mut cum = -cf.capex_delta_eur;
    f19.push(row![0u32, -cf.capex_delta_eur, -cf.capex_delta_eur, cum]);
    for (t, s) in cf.annual_net_savings.iter().enumerate() {
        let d = s / (1.0 + p.discount_rate).powi(t as i32 + 1);
        cum += d;
        f19.push(row![t + 1, *s, d, cum]);
    }

    Ok(vec![
        tab("econ_params", params_t),
        tab("npv_farm_size", npv_t),
        tab("lca", lca_t),
        tab("bom_co2", bom_t),
        tab("competitors", comp.clone()),
        fig(16, f16),
        fig(17, f17),
        fig(18, comp),
        fig(19, f19),
    ])
}

fn competitors_table() -> Result<Table> {
    let mut rdr = csv::Reader::from_reader(crate::data::COMPETITORS_CSV.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let cols: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(&cols);
    for r in rdr.records() {
        t.push(r?.iter().map(str::to_string).collect());
    }
    Ok(t)
}

// --------------------------------------------------------------------- uq

pub fn uq(ctx: &RunContext, modes: &[UqMode]) -> Result<Vec<Output>> {
    let p = &ctx.params;
    let problem = uq::default_problem();
    let mut out = Vec::new();
    let mut prob_t = Table::new(&["name", "lower", "upper", "units"]);
    for u in &problem {
        prob_t.push(row![u.name, u.lower, u.upper, u.units]);
    }
    out.push(tab("uq_problem", prob_t));

    if modes.contains(&UqMode::Sobol) {
        let s = uq::sobol_indices(p, &problem, uq::DEFAULT_SOBOL_BASE, ctx.seed)?;
        let mut t = Table::new(&["parameter", "output", "s1", "st", "s1_clipped"]);
        for (i, name) in s.parameters.iter().enumerate() {
            for (o, out_name) in s.outputs.iter().enumerate() {
                t.push(row![name, out_name, s.s1[i][o], s.st[i][o], s.s1[i][o].max(0.0)]);
            }
        }
        let mut meta = Table::new(&["n_base", "parameters", "evaluations"]);
        meta.push(row![s.n_base, s.parameters.len(), s.evaluations]);
        out.push(tab("sobol", t.clone()));
        out.push(tab("sobol_meta", meta));
        out.push(fig(13, t));
    }
    if modes.contains(&UqMode::Tornado) {
        let (baseline, bars) = uq::tornado(p, &problem)?;
        let mut t = Table::new(&["rank", "parameter", "reference", "lower", "upper", "npv_lo_eur", "npv_hi_eur", "swing_eur", "baseline_npv_eur"]);
        for (i, b) in bars.iter().enumerate() {
            t.push(row![i + 1, b.parameter, b.reference_value, b.lower, b.upper, b.npv_lo, b.npv_hi, b.swing(), baseline]);
        }
        out.push(tab("tornado", t.clone()));
        out.push(fig(14, t));
    }
    if modes.contains(&UqMode::Mc) {
        let mc = uq::monte_carlo(p, &problem, uq::DEFAULT_MC_SAMPLES, ctx.seed)?;
        let mc2 = uq::monte_carlo(p, &problem, 2 * uq::DEFAULT_MC_SAMPLES, ctx.seed)?;
        let mut pt = Table::new(&["output", "samples", "p10", "p50", "p90"]);
        for run in [&mc, &mc2] {
            for (k, name) in uq::OUTPUT_NAMES.iter().enumerate() {
                let q = &run.percentiles[k];
                pt.push(row![name, run.outputs.len(), q.p10, q.p50, q.p90]);
            }
        }
        let mut cols: Vec<&str> = vec!["sample"];
        cols.extend(problem.iter().map(|u| u.name.as_str()));
        cols.extend(uq::OUTPUT_NAMES);
        let mut st = Table::new(&cols);
        for (i, (x, y)) in mc.inputs.iter().zip(&mc.outputs).enumerate() {
            let mut r = row![i];
            r.extend(x.iter().map(crate::output::Cell::cell));
            r.extend(y.iter().map(crate::output::Cell::cell));
            st.push(r);
        }
        out.push(tab("mc_percentiles", pt));
        out.push(tab("mc_samples", st));
        out.push(fig(15, mc_envelope_table(p, &problem, &mc)?));
    }
    Ok(out)
}

pub const MC_DRAFT_BINS: usize = 10;

/// Throughput samples against draft, binned percentiles and the reference point.
pub fn mc_envelope_table(p: &ScenarioParams, problem: &[uq::UncertainParameter], mc: &uq::McResult) -> Result<Table> {
    let di = problem.iter().position(|u| u.name == "draft_load_N").ok_or_else(|| crate::error::domain("problem has no draft_load_N"))?;
    let (lo, hi) = (problem[di].lower, problem[di].upper);
    let mut t = Table::new(&["kind", "draft_load_N", "throughput_dec_per_day"]);
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); MC_DRAFT_BINS];
    for (x, y) in mc.inputs.iter().zip(&mc.outputs) {
        t.push(row!["sample", x[di], y[0]]);
        let b = (((x[di] - lo) / (hi - lo)) * MC_DRAFT_BINS as f64) as usize;
        bins[b.min(MC_DRAFT_BINS - 1)].push(y[0]);
    }
    let w = (hi - lo) / MC_DRAFT_BINS as f64;
    for (b, v) in bins.iter().enumerate() {
        if v.is_empty() {
            continue;
        }
        let c = lo + (b as f64 + 0.5) * w;
        for (k, q) in [("p10", 10.0), ("p50", 50.0), ("p90", 90.0)] {
            t.push(row![k, c, percentile(v, q)]);
        }
    }
    t.push(row!["reference", p.draft_load_n, run_single(p)?.throughput_decares_per_day]);
    Ok(t)
}

// --------------------------------------------------------------- variants

pub fn variants(ctx: &RunContext) -> Result<Vec<Output>> {
    let rows = variants::compare_variants(&ctx.params)?;
    let base = rows[0].result;
    let mut t = Table::new(&[
        "variant", "throughput_dec_per_day", "energy_wh_per_decare", "capex_eur", "simple_payback_months", "surplus_power_w",
        "throughput_ratio", "energy_ratio", "capex_ratio", "payback_ratio",
    ]);
    for r in &rows {
        let x = r.result;
        t.push(row![
            r.name, x.throughput_decares_per_day, x.energy_wh_per_decare, x.capex_eur, x.simple_payback_months, x.surplus_power_w,
            x.throughput_decares_per_day / base.throughput_decares_per_day,
            x.energy_wh_per_decare / base.energy_wh_per_decare,
            x.capex_eur / base.capex_eur,
            x.simple_payback_months / base.simple_payback_months
        ]);
    }
    let mut f20 = Table::new(&["variant", "metric", "value"]);
    for r in &rows {
        let x = r.result;
        for (m, v) in [
            ("throughput_dec_per_day", x.throughput_decares_per_day),
            ("energy_wh_per_decare", x.energy_wh_per_decare),
            ("capex_eur", x.capex_eur),
            ("simple_payback_months", x.simple_payback_months),
            ("surplus_power_w", x.surplus_power_w),
        ] {
            f20.push(row![r.name, m, v]);
        }
    }
    Ok(vec![tab("variants", t), fig(20, f20)])
}

// --------------------------------------------------------------- envelope

pub fn envelope(ctx: &RunContext) -> Result<Vec<Output>> {
    let p = &ctx.params;
    let env = envelope::sweep(p)?;
    let cols = [
        "ghi_kwh_m2_yr", "farm_ha_per_yr", "annual_demand_kwh", "annual_harvest_kwh", "surplus_kwh", "grid_share", "npv_eur", "payback_yr",
    ];
    let mut cells = Table::new(&cols);
    let mut f21_cols = vec!["kind", "name"];
    f21_cols.extend(cols);
    let mut f21 = Table::new(&f21_cols);
    for c in &env.cells {
        let r = row![c.ghi_kwh_m2_yr, c.farm_ha_per_yr, c.annual_demand_kwh, c.annual_harvest_kwh, c.surplus_kwh, c.grid_share, c.npv_eur, c.payback_yr];
        let mut fr = row!["cell", ""];
        fr.extend(r.iter().cloned());
        cells.push(r);
        f21.push(fr);
    }
    let mut sites_t = Table::new(&["site", "ghi_kwh_m2_yr", "farm_ha_per_yr", "surplus_kwh", "npv_eur", "payback_yr"]);
    for s in bundled_sites() {
        let c = envelope::evaluate_cell(p, s.published_ghi, ENVELOPE_FARM_HA)?;
        sites_t.push(row![s.name, c.ghi_kwh_m2_yr, c.farm_ha_per_yr, c.surplus_kwh, c.npv_eur, c.payback_yr]);
        let mut fr = row!["site", s.name];
        fr.extend(row![c.ghi_kwh_m2_yr, c.farm_ha_per_yr, c.annual_demand_kwh, c.annual_harvest_kwh, c.surplus_kwh, c.grid_share, c.npv_eur, c.payback_yr]);
        f21.push(fr);
    }

    let pb = env.paybacks();
    let mut summary = Table::new(&["cells", "npv_positive_fraction", "off_grid_fraction", "max_payback_yr", "median_payback_yr", "breakeven_contour_monotone"]);
    summary.push(row![
        env.cells.len(),
        env.npv_positive_fraction(),
        env.off_grid_fraction(),
        pb.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        median(&pb),
        env.contour_is_monotone()
    ]);

    // refit α from the hourly simulator at the reference array
    let ref_ctx = RunContext {
        params: ScenarioParams {
            pv_area_m2: 15.0,
            ..p.clone()
        },
        ..ctx.clone()
    };
    let runs = simulate_sites(&ref_ctx, &bundled_sites())?;
    let mut alpha_t = Table::new(&["site", "synthesized_ghi_kwh_m2", "pv_kwh", "alpha"]);
    let mut alphas = Vec::new();
    for r in &runs {
        let g = r.weather.annual_ghi_kwh_m2();
        let a = envelope::refit_alpha(r.ledger.pv_kwh(), 15.0, g)?;
        alphas.push(a);
        alpha_t.push(row![r.site.name, g, r.ledger.pv_kwh(), a]);
    }
    alpha_t.push(row!["median", "", "", median(&alphas)]);

    Ok(vec![
        tab("envelope", cells),
        tab("envelope_summary", summary),
        tab("envelope_sites", sites_t),
        tab("alpha_refit", alpha_t),
        fig(21, f21),
    ])
}

// -------------------------------------------------------------------- all

pub fn all(ctx: &RunContext) -> Result<Vec<Output>> {
    let parts: Vec<Result<Vec<Output>>> = vec![
        physics(ctx),
        draft(ctx),
        energy(ctx, &bundled_sites()),
        plan(ctx, None),
        compaction(ctx),
        econ(ctx),
        uq(ctx, &[UqMode::Sobol, UqMode::Tornado, UqMode::Mc]),
        variants(ctx),
        envelope(ctx),
    ];
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    let mut summary = Table::new(&["metric", "value"]);
    let r = run_single(&ctx.params)?;
    for (k, v) in [
        ("throughput_dec_per_day", r.throughput_decares_per_day),
        ("energy_wh_per_decare", r.energy_wh_per_decare),
        ("capex_eur", r.capex_eur),
        ("simple_payback_months", r.simple_payback_months),
        ("surplus_power_w", r.surplus_power_w),
    ] {
        summary.push(row![k, v]);
    }
    out.push(tab("run_single", summary));
    Ok(out)
}
