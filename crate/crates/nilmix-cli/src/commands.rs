//! Command handlers: parse the config, run the owning module, shape the
//! result document.

use std::path::PathBuf;

use nilmix::cocycle::{
    compatibility_solution_space, rigidity_pipeline, RigidityConfig, TorusCocycle,
};
use nilmix::dioph::waldschmidt::{CalibrationInstance, ParamValue, WaldschmidtParams};
use nilmix::dioph::{
    calibrate_c1, empirical_gap, height, sunit_solutions, waldschmidt_bound, SUnitInstance,
};
use nilmix::error::{Error, Result};
use nilmix::exact::numfield::{NfElement, NumberField};
use nilmix::exact::UnimodularMatrix;
use nilmix::heis::{
    boxmap_equidistribution_test, boxmap_obstruction_search, mc_correlation, BoxMap, Bump,
    CharacterBump, DichotomyParams, ExactDirections, HeisAuto, HeisTestFn,
};
use nilmix::json as wire;
use nilmix::spectrum::{
    anosov_check, ergodicity_certificate, galois_orbits, lemma21_constant, lyapunov::verify_growth_inequality,
    simultaneous_spectrum, AnosovOutcome, ErgodicityOutcome,
};
use nilmix::toral::{
    multi_correlation, separation_stats, CorrelationBudget, DecayModel, TrigPolynomial,
};
use serde_json::{json, Value};

use crate::output::{emit, Output};
use crate::RunArgs;

pub fn run(command: &str, args: &RunArgs) -> Result<()> {
    let raw = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::validation(format!("reading {}: {}", args.config.display(), e)))?;
    let config: Value = serde_json::from_str(&raw)
        .map_err(|e| Error::validation(format!("config JSON: {}", e)))?;
    let prec = args
        .precision
        .or_else(|| config.get("precision").and_then(|v| v.as_u64()).map(|v| v as usize))
        .unwrap_or(128);
    let seed = args
        .seed
        .or_else(|| config.get("seed").and_then(|v| v.as_u64()))
        .unwrap_or(0);
    let budget = config.get("budget").and_then(|v| v.as_u64()).unwrap_or(100_000_000);

    let output = match command {
        "spectrum" => cmd_spectrum(&config, prec)?,
        "ergodic" => cmd_ergodic(&config, prec)?,
        "anosov" => cmd_anosov(&config, prec)?,
        "lyapunov-constant" => cmd_lyapunov(&config, prec)?,
        "height" => cmd_height(&config, prec)?,
        "waldschmidt" => cmd_waldschmidt(&config, prec)?,
        "sunit-search" => cmd_sunit(&config, prec, budget)?,
        "mix-exact" => cmd_mix_exact(&config, prec, budget)?,
        "mix-mc" => cmd_mix_mc(&config, seed)?,
        "shape" => cmd_shape(&config, prec, budget)?,
        "boxmap-check" => cmd_boxmap(&config, prec, seed)?,
        "cocycle" => cmd_cocycle(&config, prec)?,
        other => return Err(Error::validation(format!("unknown command {:?}", other))),
    };

    let out_path = resolve_out_path(command, args, &config, &output);
    let resolved = json!({
        "command": command,
        "config": config,
        "precision": prec,
        "seed": seed,
        "budget": budget,
        "output": out_path.display().to_string(),
    });
    emit(&out_path, &resolved, &output)
}

fn resolve_out_path(command: &str, args: &RunArgs, config: &Value, output: &Output) -> PathBuf {
    if let Some(p) = &args.out {
        return p.clone();
    }
    if let Some(p) = config.get("output").and_then(|o| o.get("path")).and_then(|v| v.as_str()) {
        return PathBuf::from(p);
    }
    PathBuf::from(format!("{}.{}", command, output.default_extension()))
}

// ---- spectrum-layer commands ----

fn cmd_spectrum(config: &Value, prec: usize) -> Result<Output> {
    let action = wire::action_from_json(wire::get(config, "action")?)?;
    let chars = simultaneous_spectrum(&action, prec)?;
    let orbits = galois_orbits(&chars);
    let characters: Vec<Value> = chars
        .iter()
        .map(|c| {
            let values: Vec<Value> = c
                .values()
                .iter()
                .map(|v| {
                    Value::Array(
                        v.coords().iter().map(|q| Value::String(wire::rational_to_string(q))).collect(),
                    )
                })
                .collect();
            let modulus = c.modulus_at(&vec![1; 0].iter().map(|_| 0i64).chain([0i64; 0]).collect::<Vec<_>>().as_slice(), prec);
            let _ = modulus; // modulus of the empty word is trivial; report per generator below
            let gen_moduli: Vec<Value> = (0..action.rank())
                .map(|i| {
                    let mut z = vec![0i64; action.rank()];
                    z[i] = 1;
                    c.modulus_at(&z, prec).map(|m| wire::interval_to_json(&m)).unwrap_or(Value::Null)
                })
                .collect();
            json!({
                "field": wire::poly_to_json(c.field().defining_poly()),
                "embedding_index": c.embedding_index(),
                "block": c.block(),
                "values": values,
                "generator_moduli": gen_moduli,
            })
        })
        .collect();
    let orbit_sizes: Vec<usize> = orbits.iter().map(|o| o.size()).collect();
    Ok(Output::Json(json!({
        "dimension": action.dim(),
        "characters": characters,
        "orbit_sizes": orbit_sizes,
    })))
}

fn cmd_ergodic(config: &Value, prec: usize) -> Result<Output> {
    let action = wire::action_from_json(wire::get(config, "action")?)?;
    let out = match ergodicity_certificate(&action, prec)? {
        ErgodicityOutcome::Certified(cert) => json!({
            "ergodic": true,
            "orbits_certified": cert.per_orbit.len(),
        }),
        ErgodicityOutcome::Counterexample { z, cyclotomic_index, min_poly } => json!({
            "ergodic": false,
            "counterexample": z,
            "cyclotomic_index": cyclotomic_index,
            "eigenvalue_min_poly": wire::poly_to_json(&min_poly),
        }),
    };
    Ok(Output::Json(out))
}

fn cmd_anosov(config: &Value, prec: usize) -> Result<Output> {
    let action = wire::action_from_json(wire::get(config, "action")?)?;
    let z = wire::ivec_from(wire::get(config, "z")?, "z")?;
    let out = match anosov_check(&action, &z, prec)? {
        AnosovOutcome::Anosov => json!({ "anosov": true }),
        AnosovOutcome::NotAnosov { eigenvalue, factor } => json!({
            "anosov": false,
            "witness_eigenvalue": {
                "re": wire::interval_to_json(&eigenvalue.re),
                "im": wire::interval_to_json(&eigenvalue.im),
            },
            "witness_factor": wire::poly_to_json(&factor),
        }),
    };
    Ok(Output::Json(out))
}

fn cmd_lyapunov(config: &Value, prec: usize) -> Result<Output> {
    let action = wire::action_from_json(wire::get(config, "action")?)?;
    let verify_radius =
        config.get("verify_radius").and_then(|v| v.as_i64()).unwrap_or(25);
    // the growth constant presumes total ergodicity; certify it first
    match ergodicity_certificate(&action, prec)? {
        ErgodicityOutcome::Certified(_) => {}
        ErgodicityOutcome::Counterexample { z, .. } => {
            return Err(Error::degenerate(format!(
                "action is not totally ergodic (counterexample z = {:?})",
                z
            )))
        }
    }
    let chars = simultaneous_spectrum(&action, prec)?;
    let orbits = galois_orbits(&chars);
    let mut out_orbits = Vec::new();
    for orbit in &orbits {
        let c = lemma21_constant(&orbit, prec)?;
        let checked = verify_growth_inequality(&orbit, &c.enclosure, verify_radius, prec)?;
        out_orbits.push(json!({
            "orbit_size": orbit.size(),
            "constant": wire::interval_to_json(&c.enclosure),
            "facets": c.facets.iter().map(|(k, s, e)| json!({
                "coordinate": k, "sign": s, "enclosure": wire::interval_to_json(e),
            })).collect::<Vec<_>>(),
            "growth_inequality_checked_points": checked,
        }));
    }
    Ok(Output::Json(json!({
        "verify_radius": verify_radius,
        "orbits": out_orbits,
    })))
}

// ---- diophantine commands ----

fn field_from_config(config: &Value) -> Result<std::sync::Arc<NumberField>> {
    let poly = wire::poly_from_json(wire::get(config, "field")?)?;
    NumberField::new(poly)
}

fn element_from_json(field: &std::sync::Arc<NumberField>, v: &Value) -> Result<NfElement> {
    let coords = wire::rationals_from_json(v, "element coordinates")?;
    NfElement::new(field.clone(), coords)
}

fn cmd_height(config: &Value, prec: usize) -> Result<Output> {
    let field = field_from_config(config)?;
    let u = element_from_json(&field, wire::get(config, "element")?)?;
    let h = height(&u, prec)?;
    Ok(Output::Json(json!({
        "height": wire::interval_to_json(&h.value),
        "degree": h.degree,
        "min_poly": wire::poly_to_json(&u.min_poly()),
    })))
}

fn param_value(config: &Value, key: &str) -> Result<Option<ParamValue>> {
    match config.get(key) {
        None => Ok(None),
        Some(Value::String(s)) if s == "e" => Ok(Some(ParamValue::E)),
        Some(Value::String(s)) => Ok(Some(ParamValue::Rational(wire::rational_from_str(s)?))),
        Some(_) => Err(Error::validation(format!("{} must be \"e\" or a rational string", key))),
    }
}

fn waldschmidt_params(config: &Value) -> Result<WaldschmidtParams> {
    let mut p = WaldschmidtParams::default();
    if let Some(v) = param_value(config, "c1")? {
        p.c1 = v;
    }
    if let Some(v) = param_value(config, "c2")? {
        p.c2 = v;
    }
    if let Some(v) = param_value(config, "c3")? {
        p.c3 = v;
    }
    if let Some(v) = param_value(config, "c")? {
        p.c = v;
    }
    if let Some(e) = config.get("embedding").and_then(|v| v.as_u64()) {
        p.embedding = e as usize;
    }
    Ok(p)
}

fn cmd_waldschmidt(config: &Value, prec: usize) -> Result<Output> {
    let field = field_from_config(config)?;
    let u_list: Vec<NfElement> = wire::get(config, "u_list")?
        .as_array()
        .ok_or_else(|| Error::validation("u_list must be an array"))?
        .iter()
        .map(|v| element_from_json(&field, v))
        .collect::<Result<_>>()?;
    let u = element_from_json(&field, wire::get(config, "u")?)?;
    let z = wire::ivec_from(wire::get(config, "z")?, "z")?;
    let params = waldschmidt_params(config)?;
    let bound = waldschmidt_bound(&u_list, &u, &z, &params, prec)?;
    let gap = empirical_gap(&u_list, &u, &z, params.embedding, prec)?;
    let chain = &bound.chain;
    let mut doc = json!({
        "formula_bound": wire::interval_to_json(&bound.formula),
        "proof_route_bound": wire::interval_to_json(&bound.proof_route),
        "empirical_gap": wire::interval_to_json(&gap),
        "chain": {
            "degree": chain.degree,
            "a": chain.a.iter().map(wire::interval_to_json).collect::<Vec<_>>(),
            "b": wire::interval_to_json(&chain.b),
            "a_max": wire::interval_to_json(&chain.a_max),
            "m": wire::interval_to_json(&chain.m),
            "z0": wire::interval_to_json(&chain.z0),
            "g0": wire::interval_to_json(&chain.g0),
            "u0": wire::interval_to_json(&chain.u0),
            "side_condition": chain.side_condition,
        },
    });
    if let Some(grid) = config.get("calibrate") {
        let insts: Vec<CalibrationInstance> = grid
            .as_array()
            .ok_or_else(|| Error::validation("calibrate must be an array of instances"))?
            .iter()
            .map(|inst| {
                let u_list: Vec<NfElement> = wire::get(inst, "u_list")?
                    .as_array()
                    .ok_or_else(|| Error::validation("u_list must be an array"))?
                    .iter()
                    .map(|v| element_from_json(&field, v))
                    .collect::<Result<_>>()?;
                Ok(CalibrationInstance {
                    u_list,
                    u: element_from_json(&field, wire::get(inst, "u")?)?,
                    z: wire::ivec_from(wire::get(inst, "z")?, "z")?,
                    embedding: wire::get(inst, "embedding")
                        .ok()
                        .and_then(|v| v.as_u64())
                        .unwrap_or(params.embedding as u64) as usize,
                })
            })
            .collect::<Result<_>>()?;
        let (c1, binding) = calibrate_c1(&insts, &params, prec)?;
        doc["calibration"] = json!({
            "c1": wire::rational_to_string(&c1),
            "binding_instance": binding,
            "instances": insts.len(),
        });
    }
    Ok(Output::Json(doc))
}

fn cmd_sunit(config: &Value, prec: usize, budget: u64) -> Result<Output> {
    let field = field_from_config(config)?;
    let units: Vec<NfElement> = wire::get(config, "units")?
        .as_array()
        .ok_or_else(|| Error::validation("units must be an array"))?
        .iter()
        .map(|v| element_from_json(&field, v))
        .collect::<Result<_>>()?;
    let coefficients: Vec<NfElement> = wire::get(config, "coefficients")?
        .as_array()
        .ok_or_else(|| Error::validation("coefficients must be an array"))?
        .iter()
        .map(|v| element_from_json(&field, v))
        .collect::<Result<_>>()?;
    let place = wire::i64_from(wire::get(config, "place")?, "place")? as usize;
    let epsilon = wire::rational_from_str(
        wire::get(config, "epsilon")?
            .as_str()
            .ok_or_else(|| Error::validation("epsilon must be a rational string"))?,
    )?;
    let exponent_box = wire::i64_from(wire::get(config, "box")?, "box")?;
    let inst = SUnitInstance { field, fundamental_units: units, coefficients, place, epsilon };
    let search = sunit_solutions(&inst, exponent_box, budget, prec)?;
    let solutions: Vec<Value> = search
        .solutions
        .iter()
        .map(|s| {
            json!({
                "coordinates": s.coordinates.iter().map(|c| json!({
                    "sign": c.sign, "exponents": c.exponents,
                })).collect::<Vec<_>>(),
                "degenerate": s.is_degenerate(),
                "vanishing_subsums": s.vanishing_subsums,
                "lhs": wire::interval_to_json(&s.lhs),
                "height": wire::interval_to_json(&s.height),
            })
        })
        .collect();
    let counts: Vec<Value> = (0..=exponent_box)
        .map(|b| json!({ "box": b, "nondegenerate": search.nondegenerate_count_within(b) }))
        .collect();
    let final_count = search.nondegenerate_count();
    let stabilization = (0..=exponent_box)
        .find(|&b| search.nondegenerate_count_within(b) == final_count);
    Ok(Output::Json(json!({
        "solutions": solutions,
        "nondegenerate_count": final_count,
        "counts_by_box": counts,
        "stabilization_box": stabilization,
        "partial": search.partial,
        "scanned": search.scanned,
    })))
}

// ---- toral commands ----

fn functions_from_config(config: &Value) -> Result<Vec<TrigPolynomial>> {
    wire::get(config, "functions")?
        .as_array()
        .ok_or_else(|| Error::validation("functions must be an array"))?
        .iter()
        .map(wire::trigpoly_from_json)
        .collect()
}

fn cmd_mix_exact(config: &Value, prec: usize, budget: u64) -> Result<Output> {
    let action = wire::action_from_json(wire::get(config, "action")?)?;
    let f_list = functions_from_config(config)?;
    let sweep: Vec<(i64, Vec<Vec<i64>>)> = wire::get(config, "sweep")?
        .as_array()
        .ok_or_else(|| Error::validation("sweep must be an array"))?
        .iter()
        .map(|entry| {
            let sep = wire::i64_from(wire::get(entry, "separation")?, "separation")?;
            let zs: Vec<Vec<i64>> = wire::get(entry, "z_list")?
                .as_array()
                .ok_or_else(|| Error::validation("z_list must be an array"))?
                .iter()
                .map(|z| wire::ivec_from(z, "z"))
                .collect::<Result<_>>()?;
            Ok((sep, zs))
        })
        .collect::<Result<_>>()?;
    let cb = CorrelationBudget { max_tuples: budget, compute_separation: true, prec };
    let mut rows = Vec::with_capacity(sweep.len());
    for (sep, z_list) in &sweep {
        let r = multi_correlation(&f_list, z_list, &action, &cb)?;
        let stats = r.separation.as_ref();
        rows.push(vec![
            sep.to_string(),
            stats.map(|s| format!("{:.17e}", s.n.to_f64())).unwrap_or_default(),
            stats
                .and_then(|s| s.n_star.as_ref())
                .map(|n| format!("{:.17e}", n.to_f64()))
                .unwrap_or_default(),
            wire::rational_to_string(&r.value.re),
            wire::rational_to_string(&r.value.im),
            wire::rational_to_string(&r.radius),
        ]);
    }
    Ok(Output::Csv {
        header: ["separation", "N", "N_star", "corr_re", "corr_im", "radius"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    })
}

fn cmd_shape(config: &Value, prec: usize, budget: u64) -> Result<Output> {
    let action = wire::action_from_json(wire::get(config, "action")?)?;
    let base: Vec<Vec<i64>> = wire::get(config, "z_list")?
        .as_array()
        .ok_or_else(|| Error::validation("z_list must be an array"))?
        .iter()
        .map(|z| wire::ivec_from(z, "z"))
        .collect::<Result<_>>()?;
    let n_max = wire::i64_from(wire::get(config, "n_max")?, "n_max")?;
    let f_list = functions_from_config(config)?;
    let base_stats = separation_stats(&action, &base, prec)?;
    let base_nstar = base_stats
        .n_star
        .clone()
        .ok_or_else(|| Error::undecided("no qualifying character value for the base shape"))?;
    let cb = CorrelationBudget { max_tuples: budget, compute_separation: false, prec };
    let mut rows = Vec::new();
    let mut power_ok = true;
    let mut sweep = Vec::new();
    for n in 1..=n_max {
        let zs: Vec<Vec<i64>> =
            base.iter().map(|z| z.iter().map(|&v| v * n).collect()).collect();
        let stats = separation_stats(&action, &zs, prec)?;
        let nstar = stats
            .n_star
            .clone()
            .ok_or_else(|| Error::undecided("no qualifying character value"))?;
        // certified power identity N_*(n z) = N_*(z)^n
        let powed = base_nstar.pow_i64(n, prec + 64)?;
        if !powed.intersects(&nstar) {
            power_ok = false;
        }
        let r = multi_correlation(&f_list, &zs, &action, &cb)?;
        let excess = r.value.sub(&nilmix::toral::correlation::product_of_means(&f_list));
        sweep.push(nilmix::toral::DecaySample {
            separation: n,
            excess: excess.modulus_f64(),
            radius: nilmix::toral::rational_to_f64(&r.radius),
            exactly_zero: excess.is_zero(),
        });
        rows.push(json!({
            "n": n,
            "n_star": wire::interval_to_json(&nstar),
            "corr_re": wire::rational_to_string(&r.value.re),
            "corr_im": wire::rational_to_string(&r.value.im),
            "radius": wire::rational_to_string(&r.radius),
        }));
    }
    if !power_ok {
        return Err(Error::falsification("N_*(n z) = N_*(z)^n failed a certified check"));
    }
    let fit = nilmix::toral::fit::fit_samples(sweep, DecayModel::RhoPower);
    Ok(Output::Json(json!({
        "power_identity_certified_through": n_max,
        "rho_hat": fit.exponent,
        "zero_onset": fit.zero_onset,
        "samples_used": fit.samples_used,
        "rows": rows,
    })))
}

// ---- Heisenberg commands ----

fn heis_auto_from_json(v: &Value) -> Result<HeisAuto> {
    let rows = wire::get(v, "block")?;
    let rows = rows.as_array().ok_or_else(|| Error::validation("block must be an array"))?;
    let mut entries = Vec::new();
    for row in rows {
        for c in row.as_array().ok_or_else(|| Error::validation("block row"))? {
            entries.push(wire::bigint_from_str(
                c.as_str().ok_or_else(|| Error::validation("block entry must be a string"))?,
            )?);
        }
    }
    let block = UnimodularMatrix::new(nilmix::exact::IntMatrix::new(2, entries)?)?;
    match v.get("lin") {
        None => HeisAuto::from_block(block),
        Some(Value::String(s)) if s == "canonical" => HeisAuto::from_block(block),
        Some(lin) => {
            let q = wire::rationals_from_json(lin, "lin")?;
            if q.len() != 2 {
                return Err(Error::validation("lin needs two rationals"));
            }
            HeisAuto::new(block, (q[0].clone(), q[1].clone()))
        }
    }
}

fn bump_from_json(v: &Value) -> Result<Bump> {
    let center = wire::rationals_from_json(wire::get(v, "center")?, "center")?;
    if center.len() != 3 {
        return Err(Error::validation("bump center needs three coordinates"));
    }
    Bump::new(
        [center[0].clone(), center[1].clone(), center[2].clone()],
        wire::rational_from_str(
            wire::get(v, "radius")?.as_str().ok_or_else(|| Error::validation("radius"))?,
        )?,
        wire::i64_from(wire::get(v, "power")?, "power")? as u32,
        wire::rational_from_str(
            wire::get(v, "amplitude")?.as_str().ok_or_else(|| Error::validation("amplitude"))?,
        )?,
    )
}

fn testfn_from_json(v: &Value) -> Result<HeisTestFn> {
    let ty = wire::get(v, "type")?
        .as_str()
        .ok_or_else(|| Error::validation("function type must be a string"))?;
    match ty {
        "constant" => Ok(HeisTestFn::Constant(wire::rational_from_str(
            wire::get(v, "value")?.as_str().ok_or_else(|| Error::validation("value"))?,
        )?)),
        "bump" => Ok(HeisTestFn::Bump(bump_from_json(v)?)),
        "zero_mean_pair" => HeisTestFn::zero_mean_pair(
            bump_from_json(wire::get(v, "pos")?)?,
            bump_from_json(wire::get(v, "neg")?)?,
        ),
        "character" | "centered_character" => {
            let freq = wire::ivec_from(wire::get(v, "frequency")?, "frequency")?;
            if freq.len() != 2 {
                return Err(Error::validation("character frequency has two components"));
            }
            let c = CharacterBump::new(
                [freq[0], freq[1]],
                wire::rational_from_str(
                    wire::get(v, "center")?.as_str().ok_or_else(|| Error::validation("center"))?,
                )?,
                wire::rational_from_str(
                    wire::get(v, "radius")?.as_str().ok_or_else(|| Error::validation("radius"))?,
                )?,
                wire::i64_from(wire::get(v, "power")?, "power")? as u32,
                wire::rational_from_str(
                    wire::get(v, "amplitude")?
                        .as_str()
                        .ok_or_else(|| Error::validation("amplitude"))?,
                )?,
            )?;
            if ty == "character" {
                Ok(HeisTestFn::Character(c))
            } else {
                Ok(HeisTestFn::CenteredCharacter(c))
            }
        }
        other => Err(Error::validation(format!("unknown function type {:?}", other))),
    }
}

fn cmd_mix_mc(config: &Value, seed: u64) -> Result<Output> {
    let generators: Vec<HeisAuto> = wire::get(config, "generators")?
        .as_array()
        .ok_or_else(|| Error::validation("generators must be an array"))?
        .iter()
        .map(heis_auto_from_json)
        .collect::<Result<_>>()?;
    let f_list: Vec<HeisTestFn> = wire::get(config, "functions")?
        .as_array()
        .ok_or_else(|| Error::validation("functions must be an array"))?
        .iter()
        .map(testfn_from_json)
        .collect::<Result<_>>()?;
    let samples = wire::get(config, "samples")?
        .as_u64()
        .ok_or_else(|| Error::validation("samples must be a positive integer"))?;
    let words_json = wire::get(config, "words")?
        .as_array()
        .ok_or_else(|| Error::validation("words must be an array"))?;
    let mut rows = Vec::new();
    for word_set in words_json {
        let exps: Vec<Vec<i64>> = word_set
            .as_array()
            .ok_or_else(|| Error::validation("word entry must be an array of exponent vectors"))?
            .iter()
            .map(|z| wire::ivec_from(z, "word"))
            .collect::<Result<_>>()?;
        if exps.len() != f_list.len() {
            return Err(Error::validation("one exponent vector per function required"));
        }
        let words: Vec<HeisAuto> = exps
            .iter()
            .map(|z| HeisAuto::word(&generators, z))
            .collect::<Result<_>>()?;
        let est = mc_correlation(&f_list, &words, samples, seed)?;
        let word_str = exps
            .iter()
            .map(|z| z.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";");
        rows.push(vec![
            word_str,
            format!("{:.17e}", est.estimate),
            format!("{:.17e}", est.stderr),
            est.samples.to_string(),
            est.seed.to_string(),
        ]);
    }
    Ok(Output::Csv {
        header: ["z_word", "estimate", "stderr", "samples", "seed"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    })
}

fn cmd_boxmap(config: &Value, prec: usize, seed: u64) -> Result<Output> {
    // exact obstruction side
    let dirs_json = wire::get(config, "projected_directions")?;
    let field = match dirs_json.get("field") {
        Some(f) => NumberField::new(wire::poly_from_json(f)?)?,
        None => NumberField::rationals(),
    };
    let embedding =
        dirs_json.get("embedding").and_then(|v| v.as_u64()).unwrap_or(0) as usize;
    let dirs: Vec<Vec<NfElement>> = wire::get(dirs_json, "dirs")?
        .as_array()
        .ok_or_else(|| Error::validation("dirs must be an array"))?
        .iter()
        .map(|d| {
            d.as_array()
                .ok_or_else(|| Error::validation("direction must be an array"))?
                .iter()
                .map(|c| element_from_json(&field, c))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let exact = ExactDirections { field, dirs, embedding };
    let sides = wire::rationals_from_json(wire::get(config, "sides")?, "sides")?;
    let delta = wire::rational_from_str(
        wire::get(config, "delta")?.as_str().ok_or_else(|| Error::validation("delta"))?,
    )?;
    let params = DichotomyParams::default();
    let search = boxmap_obstruction_search(&exact, &sides, &delta, &params, prec)?;

    // empirical equidistribution side
    let bm_json = wire::get(config, "boxmap")?;
    let base = wire::rationals_from_json(wire::get(bm_json, "base")?, "base")?;
    let dirs_num: Vec<[f64; 3]> = wire::get(bm_json, "directions")?
        .as_array()
        .ok_or_else(|| Error::validation("directions"))?
        .iter()
        .map(|d| {
            let v = wire::rationals_from_json(d, "direction")?;
            if v.len() != 3 {
                return Err(Error::validation("directions are 3-vectors"));
            }
            Ok([
                nilmix::toral::rational_to_f64(&v[0]),
                nilmix::toral::rational_to_f64(&v[1]),
                nilmix::toral::rational_to_f64(&v[2]),
            ])
        })
        .collect::<Result<_>>()?;
    let sides_num: Vec<f64> = sides.iter().map(nilmix::toral::rational_to_f64).collect();
    let bm = BoxMap::new(
        [
            nilmix::toral::rational_to_f64(&base[0]),
            nilmix::toral::rational_to_f64(&base[1]),
            nilmix::toral::rational_to_f64(&base[2]),
        ],
        dirs_num,
        sides_num,
    )?;
    let f = testfn_from_json(wire::get(config, "function")?)?;
    let delta_f = nilmix::toral::rational_to_f64(&delta);
    let theta = config.get("theta").and_then(|v| v.as_f64()).unwrap_or(0.5);
    let quad = config.get("quad_points").and_then(|v| v.as_u64()).unwrap_or(1_000_000);
    let rep = boxmap_equidistribution_test(&bm, &f, delta_f, theta, quad, seed)?;

    // dichotomy coherence: exactly one branch may hold with margin
    let obstructed = search.found.is_some();
    let strong_pass = rep.discrepancy <= rep.threshold / 2.0;
    let coherent = !(obstructed && strong_pass) && (obstructed || rep.pass);
    let doc = json!({
        "obstruction": {
            "found": search.found,
            "complete": search.complete,
            "ball_radius": search.ball_radius,
            "scanned": search.scanned,
        },
        "equidistribution": {
            "box_average": format!("{:.17e}", rep.box_average),
            "space_mean": format!("{:.17e}", rep.space_mean),
            "discrepancy": format!("{:.17e}", rep.discrepancy),
            "threshold": format!("{:.17e}", rep.threshold),
            "quadrature_slack": format!("{:.17e}", rep.quadrature_slack),
            "pass": rep.pass,
            "points": rep.points,
        },
        "branch": if obstructed { "obstruction" } else { "equidistribution" },
        "coherent": coherent,
    });
    if !coherent {
        eprintln!("nilmix: dichotomy incoherence: {}", doc);
        return Err(Error::falsification(
            "box-map dichotomy: the instance resolves to both branches or neither",
        ));
    }
    Ok(Output::Json(doc))
}

// ---- cocycle command ----

fn cmd_cocycle(config: &Value, prec: usize) -> Result<Output> {
    let action = wire::action_from_json(wire::get(config, "action")?)?;
    let cocycle = if let Some(cb) = config.get("coboundary") {
        let phi = wire::trigpoly_from_json(wire::get(cb, "phi")?)?;
        let consts = wire::rationals_from_json(wire::get(cb, "constants")?, "constants")?;
        if consts.len() != 2 {
            return Err(Error::validation("constants must be a pair"));
        }
        TorusCocycle::from_coboundary(action.clone(), &phi, (consts[0].clone(), consts[1].clone()))?
    } else {
        TorusCocycle::new(
            action.clone(),
            wire::trigpoly_from_json(wire::get(config, "f_a")?)?,
            wire::trigpoly_from_json(wire::get(config, "f_b")?)?,
        )?
    };
    let cfg = RigidityConfig { prec, ..Default::default() };
    let report = rigidity_pipeline(&cocycle, &cfg)?;
    let mut doc = json!({
        "constants": [
            wire::rational_to_string(&report.constants.0),
            wire::rational_to_string(&report.constants.1),
        ],
        "sigma_squared": wire::rational_to_string(&report.sigma_sq),
        "transfer": report.transfer.as_ref().map(wire::trigpoly_to_json),
        "telescoping_checked": report.telescoping_checked,
        "higher_rank_sum": wire::rational_to_string(&report.trick_sum),
        "higher_rank_nonzero_terms": report.trick_nonzero_terms,
        "higher_rank_box_radius": report.trick_box_radius,
        "falsification": report.falsification,
    });
    if let Some(radii) = config.get("solution_space_radii").and_then(|v| v.as_array()) {
        let mut checks = Vec::new();
        for r in radii {
            let radius = wire::i64_from(r, "radius")?;
            let check = compatibility_solution_space(&action, radius, prec)?;
            checks.push(json!({
                "support_radius": check.support_radius,
                "dim_solutions": check.dim_solutions,
                "dim_coboundaries": check.dim_coboundaries,
                "dim_constants": check.dim_constants,
                "match": check.dimensions_match(),
            }));
        }
        doc["solution_space"] = Value::Array(checks);
    }
    if let Some(msg) = &report.falsification {
        eprintln!("nilmix: falsification: {}", msg);
        return Err(Error::falsification(msg.clone()));
    }
    Ok(Output::Json(doc))
}
