//! Experiment drivers behind the CLI subcommands.

use crate::config::RunConfig;
use crate::output::{fmt, manifest, OutputSet};
use z2scatter::analysis::{
    bootstrap_errors, bootstrap_errors_vec, electric_field, filter_ancilla, filter_q, odr_rescale,
    staggered_density, ObservableSeries,
};
use z2scatter::circuits::{
    build_controlled_evolution, build_identity_step, build_qgs, build_qinit, build_trotter_step,
    count_gates, pauli_twirl, segments, surviving_coefficients, EvolutionPlan, GroundStateAngles,
    QInitBuild,
};
use z2scatter::coeffs::{wavepacket_coefficients, AnsatzParams, MesonCoefficients};
use z2scatter::eigen::{normalize, Propagator, DENSE_LIMIT};
use z2scatter::gates::{Circuit, Gate};
use z2scatter::kinematics::kinematic_factors;
use z2scatter::lattice::{brillouin_zone, scv_state, LatticeParams};
use z2scatter::noise::{run_noisy, NoiseModel};
use z2scatter::profile::{gaussian_profile, profile_overlap, WavePacketProfile};
use z2scatter::sector::{project, SectorBasis};
use z2scatter::shots::ShotCounts;
use z2scatter::statevector::{run, sample, Statevector};
use z2scatter::translation::diagonalize_labeled;
use z2scatter::vqe::{optimize_ansatz_all, optimize_ground, SimplexOptions, VqeContext};
use z2scatter::{Cplx, Result};

/// Everything resolved from a configuration before running circuits.
pub struct Resolved {
    pub params: LatticeParams<f64>,
    pub ground: GroundStateAngles<f64>,
    pub alphas: AnsatzParams<f64>,
    pub profiles: Vec<WavePacketProfile<f64>>,
    pub tables: Vec<MesonCoefficients<f64>>,
}

fn simplex_options(config: &RunConfig) -> SimplexOptions<f64> {
    SimplexOptions {
        seed: config.seed,
        ..SimplexOptions::default()
    }
}

/// Resolve the vacuum angles and ansatz parameters, optimizing where the
/// configuration asks for it.
pub fn resolve(config: &RunConfig) -> Result<Resolved> {
    let params = config.lattice_params()?;
    let opts = simplex_options(config);
    let ground = match config.pinned_ground() {
        Some(g) => g,
        None => {
            let report = optimize_ground(&params, &opts)?;
            GroundStateAngles::new(report.best_params[0], report.best_params[1])
        }
    };
    let alphas = if config.ansatz.optimize {
        let ctx = VqeContext::new(params, ground, config.scheme.wp_trotter_steps)?;
        let (_, ap) = optimize_ansatz_all(&ctx, config.ansatz.order, &opts)?;
        ap
    } else {
        config.pinned_alphas()?
    };
    let table = kinematic_factors(params.mass, &params)?;
    let mut profiles = Vec::new();
    let mut tables = Vec::new();
    for wp in &config.wavepackets {
        let profile = gaussian_profile(wp.mu, wp.sigma, wp.kbar, &params)?;
        let coeffs =
            wavepacket_coefficients(&profile, config.ansatz.order, &alphas, &table, &params)?;
        profiles.push(profile);
        tables.push(coeffs);
    }
    Ok(Resolved {
        params,
        ground,
        alphas,
        profiles,
        tables,
    })
}

/// The assembled preparation circuit with its bookkeeping.
pub struct Preparation {
    pub n_qubits: usize,
    pub ancillas: Vec<usize>,
    pub circuit: Circuit<f64>,
    pub accept: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Q_GS plus Q_Init over `extra_qubits` additional ancillas past the
/// preparation ancillas (for the Hadamard test).
pub fn build_preparation(
    config: &RunConfig,
    resolved: &Resolved,
    extra_qubits: usize,
) -> Result<Preparation> {
    let params = &resolved.params;
    let n_sys = params.n_system_qubits();
    let n_prep = config.n_prep_ancillas();
    let n_qubits = n_sys + n_prep + extra_qubits;
    let ancillas: Vec<usize> = (n_sys..n_sys + n_prep).collect();
    let mut circuit = build_qgs(&resolved.ground, params, n_qubits);
    let (accept, warnings) = if resolved.tables.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let QInitBuild {
            circuit: init,
            accept,
            warnings,
        } = build_qinit(
            &resolved.profiles,
            &resolved.tables,
            &config.prep_scheme(),
            &ancillas,
            params,
            n_qubits,
        )?;
        circuit.append(&init);
        (accept, warnings)
    };
    Ok(Preparation {
        n_qubits,
        ancillas,
        circuit,
        accept,
        warnings,
    })
}

fn initial_state(params: &LatticeParams<f64>, n_qubits: usize) -> Statevector<f64> {
    Statevector::basis(n_qubits, scv_state(params))
}

/// Sample a circuit, noiselessly or through the stochastic noise model.
fn measure(
    config: &RunConfig,
    circuit: &Circuit<f64>,
    initial: &Statevector<f64>,
    seed: u64,
) -> Result<ShotCounts> {
    if config.noise.p1 > 0.0 || config.noise.p2 > 0.0 {
        let circuit = if config.noise.twirl && circuit.has_segment(segments::ELECTRIC) {
            pauli_twirl(circuit, segments::ELECTRIC, seed)?
        } else {
            circuit.clone()
        };
        let noise = NoiseModel::new(config.noise.p1, config.noise.p2, seed);
        run_noisy(&circuit, initial, &noise, config.noise.trajectories)
    } else {
        let state = run(circuit, initial)?;
        Ok(sample(&state, config.shots, seed))
    }
}

/// Exact-evolution reference for the prepared accept branch, available at
/// dense-solvable sizes.
struct ExactReference {
    propagator: Propagator<f64>,
    basis: SectorBasis,
    branch: Vec<Cplx<f64>>,
}

impl ExactReference {
    fn new(config: &RunConfig, resolved: &Resolved, prep: &Preparation) -> Result<Option<Self>> {
        let basis = SectorBasis::new(&resolved.params);
        if basis.len() > DENSE_LIMIT {
            return Ok(None);
        }
        let state = run(
            &prep.circuit,
            &initial_state(&resolved.params, prep.n_qubits),
        )?;
        let accept_bits: u64 = prep
            .accept
            .iter()
            .map(|&a| 1u64 << (a - resolved.params.n_system_qubits()))
            .sum();
        let (mut branch, captured) = project(&state.amps, &basis, prep.n_qubits, accept_bits);
        if captured <= 1e-12 {
            return Ok(None);
        }
        normalize(&mut branch);
        let h = z2scatter::hamiltonian::build_hamiltonian(&resolved.params);
        let propagator = Propagator::new(&h, &basis)?;
        let _ = config;
        Ok(Some(ExactReference {
            propagator,
            basis,
            branch,
        }))
    }

    fn observables_at(&self, params: &LatticeParams<f64>, t: f64) -> (Vec<f64>, f64) {
        let evolved = self.propagator.evolve(&self.branch, t);
        let n = params.n_stag();
        let mut chi = vec![0.0; n];
        let mut efield = 0.0;
        for (i, &bits) in self.basis.states().iter().enumerate() {
            let w = evolved[i].norm_sqr();
            for (site, c) in chi.iter_mut().enumerate() {
                let occ = ((bits >> site) & 1) as f64;
                *c += w * if site % 2 == 0 { occ } else { 1.0 - occ };
            }
            let boson = ((bits >> params.boson_qubit()) & 1) as f64;
            efield += w * (1.0 - 2.0 * boson);
        }
        (chi, efield)
    }
}

/// `vqe`: optimize the vacuum angles and the order-by-order ansatz, write
/// the reports, and emit a pinned configuration for exact reruns.
pub fn cmd_vqe(config: &RunConfig) -> Result<OutputSet> {
    let params = config.lattice_params()?;
    let opts = simplex_options(config);
    let mut out = OutputSet::new();

    let (ground, ground_rows) = match config.pinned_ground() {
        Some(g) => (
            g,
            vec![vec![
                fmt(g.theta_h),
                fmt(g.theta_m),
                "pinned".into(),
                String::new(),
                String::new(),
            ]],
        ),
        None => {
            let report = optimize_ground(&params, &opts)?;
            let g = GroundStateAngles::new(report.best_params[0], report.best_params[1]);
            // Exact references for the report.
            let basis = SectorBasis::new(&params);
            let h = z2scatter::hamiltonian::build_hamiltonian(&params);
            let sol = z2scatter::eigen::diagonalize(&h, &basis, 1)?;
            let nq = params.n_system_qubits();
            let state = run(&build_qgs(&g, &params, nq), &initial_state(&params, nq))?;
            let (vec_s, _) = project(&state.amps, &basis, nq, 0);
            let fidelity = z2scatter::eigen::fidelity(&vec_s, &sol.states[0])?;
            (
                g,
                vec![vec![
                    fmt(report.best_params[0]),
                    fmt(report.best_params[1]),
                    fmt(report.best_energy),
                    fmt(sol.energies[0]),
                    fmt(fidelity),
                ]],
            )
        }
    };
    out.add_csv(
        "vqe_ground.csv",
        "theta_h,theta_m,energy,exact_energy,fidelity",
        &ground_rows,
    );

    let (alphas, ansatz_rows) = if config.ansatz.optimize {
        let ctx = VqeContext::new(params, ground, config.scheme.wp_trotter_steps)?;
        let (fits, ap) = optimize_ansatz_all(&ctx, config.ansatz.order, &opts)?;
        let rows = fits
            .iter()
            .map(|f| {
                vec![
                    f.k_index.to_string(),
                    fmt(f.momentum),
                    f.order.to_string(),
                    fmt(f.circuit_energy),
                    fmt(f.operator_energy),
                    fmt(f.operator_fidelity),
                    fmt(f.circuit_fidelity),
                ]
            })
            .collect::<Vec<_>>();
        (ap, rows)
    } else {
        let ap = config.pinned_alphas()?;
        let zone = brillouin_zone(&params);
        let rows = zone
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                vec![
                    i.to_string(),
                    fmt(k),
                    ap.order(i).to_string(),
                    "pinned".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]
            })
            .collect::<Vec<_>>();
        (ap, rows)
    };
    out.add_csv(
        "vqe_ansatz.csv",
        "k_index,k,order,circuit_energy,operator_energy,operator_fidelity,circuit_fidelity",
        &ansatz_rows,
    );

    // Pinned configuration reproducing this run without optimization.
    let mut pinned = config.clone();
    pinned.ground.optimize = false;
    pinned.ground.theta_h = Some(ground.theta_h);
    pinned.ground.theta_m = Some(ground.theta_m);
    pinned.ansatz.optimize = false;
    pinned.ansatz.alphas = alphas
        .alphas
        .iter()
        .enumerate()
        .map(|(k_index, per_k)| crate::config::AlphaEntry {
            k_index,
            values: per_k.to_vec(),
        })
        .collect();
    out.add("pinned_config.toml", pinned.canonical());
    out.add("manifest.toml", manifest("vqe", config));
    Ok(out)
}

/// Gate-count rows for the standard segments of an experiment.
fn gate_count_rows(
    config: &RunConfig,
    resolved: &Resolved,
    prep: &Preparation,
) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let qgs = build_qgs(&resolved.ground, &resolved.params, prep.n_qubits);
    let counts = count_gates(&qgs);
    rows.push(vec![
        "ground_state".into(),
        segments::GROUND_STATE.into(),
        counts.single_qubit.to_string(),
        counts.cnot.to_string(),
    ]);
    let mut init_only = prep.circuit.clone();
    init_only.gates.drain(..qgs.len());
    let counts = count_gates(&init_only);
    rows.push(vec![
        "initial_state".into(),
        segments::WAVE_PACKET.into(),
        counts.single_qubit.to_string(),
        counts.cnot.to_string(),
    ]);
    if config.evolution.n_steps > 0 {
        let step = build_trotter_step(
            &EvolutionPlan::new(config.evolution.dt, 1),
            &resolved.params,
            prep.n_qubits,
        );
        let counts = count_gates(&step);
        rows.push(vec![
            "trotter_step".into(),
            segments::TROTTER_STEP.into(),
            counts.single_qubit.to_string(),
            counts.cnot.to_string(),
        ]);
    }
    rows
}

/// `prepare`: build the initial state, sample, filter, and report the
/// observables, rates, overlaps, and gate counts.
pub fn cmd_prepare(config: &RunConfig) -> Result<OutputSet> {
    let resolved = resolve(config)?;
    let prep = build_preparation(config, &resolved, 0)?;
    let counts = measure(
        config,
        &prep.circuit,
        &initial_state(&resolved.params, prep.n_qubits),
        config.seed,
    )?;
    let q_report = filter_q(&counts, &resolved.params);
    let report = filter_ancilla(&q_report, &prep.accept);

    let mut out = OutputSet::new();
    let chi = staggered_density(&report.kept, &resolved.params)?;
    let chi_err: Vec<f64> = (0..chi.len())
        .map(|site| {
            bootstrap_errors(
                &report.kept,
                |c| {
                    staggered_density(c, &resolved.params)
                        .map(|v| v[site])
                        .unwrap_or(0.0)
                },
                config.bootstrap_resamples,
                config.seed ^ site as u64,
            )
        })
        .collect();
    let reference = ExactReference::new(config, &resolved, &prep)?;
    let chi_exact: Option<Vec<f64>> = reference
        .as_ref()
        .map(|r| r.observables_at(&resolved.params, 0.0).0);
    let rows: Vec<Vec<String>> = chi
        .iter()
        .enumerate()
        .map(|(site, &value)| {
            let mut row = vec![site.to_string(), fmt(value), fmt(chi_err[site])];
            if let Some(exact) = &chi_exact {
                row.push(fmt(exact[site]));
            }
            row
        })
        .collect();
    let header = if chi_exact.is_some() {
        "site,chi,err,chi_exact"
    } else {
        "site,chi,err"
    };
    out.add_csv("density.csv", header, &rows);

    let efield = electric_field(&report.kept, &resolved.params)?;
    let efield_err = bootstrap_errors(
        &report.kept,
        |c| electric_field(c, &resolved.params).unwrap_or(0.0),
        config.bootstrap_resamples,
        config.seed ^ 0xE,
    );
    out.add_csv("efield.csv", "E,err", &[vec![fmt(efield), fmt(efield_err)]]);

    out.add_csv(
        "rates.csv",
        "slash_q,slash_a,kept_shots",
        &[vec![
            fmt(report.q_violation_rate),
            fmt(report.ancilla_violation_rate),
            report.kept.total.to_string(),
        ]],
    );

    // Pairwise packet overlaps and surviving coefficient counts.
    let mut overlap_rows = Vec::new();
    for i in 0..resolved.profiles.len() {
        for j in i + 1..resolved.profiles.len() {
            let ov = profile_overlap(&resolved.profiles[j], &resolved.profiles[i])?;
            overlap_rows.push(vec![
                i.to_string(),
                j.to_string(),
                fmt(ov.re),
                fmt(ov.im),
                fmt(ov.norm()),
            ]);
        }
    }
    out.add_csv("overlaps.csv", "packet_i,packet_j,re,im,abs", &overlap_rows);
    let scheme = config.prep_scheme();
    let surviving_rows: Vec<Vec<String>> = resolved
        .tables
        .iter()
        .enumerate()
        .map(|(i, t)| {
            vec![
                i.to_string(),
                surviving_coefficients(t, &scheme).to_string(),
            ]
        })
        .collect();
    out.add_csv("coefficients.csv", "packet,above_cutoff", &surviving_rows);
    out.add_csv(
        "gates.csv",
        "experiment,segment,single_qubit,cnot",
        &gate_count_rows(config, &resolved, &prep),
    );
    if !prep.warnings.is_empty() {
        out.add("warnings.txt", prep.warnings.join("\n") + "\n");
    }
    out.add("circuit.txt", prep.circuit.dump());
    out.add("manifest.toml", manifest("prepare", config));
    Ok(out)
}

/// `evolve`: append Trotter steps after preparation, sampling each time
/// point.
pub fn cmd_evolve(config: &RunConfig) -> Result<OutputSet> {
    let resolved = resolve(config)?;
    let prep = build_preparation(config, &resolved, 0)?;
    let reference = ExactReference::new(config, &resolved, &prep)?;
    let step = build_trotter_step(
        &EvolutionPlan::new(config.evolution.dt, 1),
        &resolved.params,
        prep.n_qubits,
    );

    let mut chi_rows = Vec::new();
    let mut e_series = ObservableSeries::new("efield");
    let mut rate_rows = Vec::new();
    // Noiseless runs evolve one statevector incrementally; noisy runs must
    // traverse the full circuit per time point.
    let noiseless = config.noise.p1 == 0.0 && config.noise.p2 == 0.0;
    let mut rolling = if noiseless {
        Some(run(
            &prep.circuit,
            &initial_state(&resolved.params, prep.n_qubits),
        )?)
    } else {
        None
    };
    let mut circuit = prep.circuit.clone();
    for step_index in 0..=config.evolution.n_steps {
        if step_index > 0 {
            if let Some(state) = rolling.as_mut() {
                *state = run(&step, state)?;
            } else {
                circuit.append(&step);
            }
        }
        let t = config.evolution.dt * step_index as f64;
        let seed = config.seed ^ (step_index as u64) << 8;
        let counts = match &rolling {
            Some(state) => sample(state, config.shots, seed),
            None => measure(
                config,
                &circuit,
                &initial_state(&resolved.params, prep.n_qubits),
                seed,
            )?,
        };
        let q_report = filter_q(&counts, &resolved.params);
        let report = filter_ancilla(&q_report, &prep.accept);
        rate_rows.push(vec![
            fmt(t),
            fmt(report.q_violation_rate),
            fmt(report.ancilla_violation_rate),
        ]);
        let chi = staggered_density(&report.kept, &resolved.params)?;
        // One resample set covers the densities and the electric field.
        let errors = bootstrap_errors_vec(
            &report.kept,
            |c| {
                let mut stats = staggered_density(c, &resolved.params).unwrap_or_default();
                stats.push(electric_field(c, &resolved.params).unwrap_or(0.0));
                stats
            },
            config.bootstrap_resamples,
            seed,
        );
        let exact = reference
            .as_ref()
            .map(|r| r.observables_at(&resolved.params, t));
        for (site, &value) in chi.iter().enumerate() {
            let mut row = vec![fmt(t), site.to_string(), fmt(value), fmt(errors[site])];
            if let Some((chi_e, _)) = &exact {
                row.push(fmt(chi_e[site]));
            }
            chi_rows.push(row);
        }
        let efield = electric_field(&report.kept, &resolved.params)?;
        e_series.push(t, efield, errors[chi.len()]);
    }

    let mut out = OutputSet::new();
    let chi_header = if reference.is_some() {
        "t,site,chi,err,chi_exact"
    } else {
        "t,site,chi,err"
    };
    out.add_csv("density.csv", chi_header, &chi_rows);
    let e_rows: Vec<Vec<String>> = (0..e_series.len())
        .map(|i| {
            vec![
                fmt(e_series.times[i]),
                fmt(e_series.values[i]),
                fmt(e_series.errors[i]),
            ]
        })
        .collect();
    out.add_csv("efield.csv", "t,E,err", &e_rows);
    out.add_csv("rates.csv", "t,slash_q,slash_a", &rate_rows);
    out.add_csv(
        "gates.csv",
        "experiment,segment,single_qubit,cnot",
        &gate_count_rows(config, &resolved, &prep),
    );
    out.add("manifest.toml", manifest("evolve", config));
    Ok(out)
}

/// `return-prob`: Hadamard-test circuits per time point.
pub fn cmd_return_prob(config: &RunConfig) -> Result<OutputSet> {
    let resolved = resolve(config)?;
    // One extra qubit: the test ancilla.
    let prep = build_preparation(config, &resolved, 1)?;
    let test_ancilla = prep.n_qubits - 1;
    let mut rows = Vec::new();
    for step_index in 0..=config.evolution.n_steps {
        let t = config.evolution.dt * step_index as f64;
        let mut results = [0.0f64; 2];
        let mut errors = [0.0f64; 2];
        for (variant, slot) in [("re", 0usize), ("im", 1usize)] {
            let mut circuit = prep.circuit.clone();
            circuit.push(Gate::h(test_ancilla));
            if step_index > 0 {
                let plan = EvolutionPlan::new(config.evolution.dt, step_index).controlled();
                let controlled = build_controlled_evolution(
                    &plan,
                    &resolved.params,
                    test_ancilla,
                    prep.n_qubits,
                );
                circuit.append(&controlled);
            }
            match variant {
                "re" => circuit.push(Gate::h(test_ancilla)),
                _ => circuit.push(Gate::rx(test_ancilla, std::f64::consts::FRAC_PI_2)),
            }
            let counts = measure(
                config,
                &circuit,
                &initial_state(&resolved.params, prep.n_qubits),
                config.seed ^ ((step_index as u64) << 8 | slot as u64),
            )?;
            let q_report = filter_q(&counts, &resolved.params);
            let report = filter_ancilla(&q_report, &prep.accept);
            results[slot] = z2scatter::analysis::ancilla_asymmetry(&report.kept, test_ancilla)?;
            errors[slot] = bootstrap_errors(
                &report.kept,
                |c| z2scatter::analysis::ancilla_asymmetry(c, test_ancilla).unwrap_or(0.0),
                config.bootstrap_resamples,
                config.seed ^ ((step_index as u64) << 8 | (2 + slot) as u64),
            );
        }
        let r = results[0] * results[0] + results[1] * results[1];
        let err =
            2.0 * ((results[0] * errors[0]).powi(2) + (results[1] * errors[1]).powi(2)).sqrt();
        rows.push(vec![
            fmt(t),
            fmt(results[0]),
            fmt(results[1]),
            fmt(r),
            fmt(err),
        ]);
    }
    let mut out = OutputSet::new();
    out.add_csv("return.csv", "t,re,im,R,err", &rows);
    out.add("manifest.toml", manifest("return-prob", config));
    Ok(out)
}

/// `oracle`: exact-diagonalization dump with momentum labels.
pub fn cmd_oracle(config: &RunConfig, n_states: usize) -> Result<OutputSet> {
    let params = config.lattice_params()?;
    let basis = SectorBasis::new(&params);
    let h = z2scatter::hamiltonian::build_hamiltonian(&params);
    let sol = diagonalize_labeled(&h, &params, &basis, n_states)?;
    let labels = sol.momentum_labels.clone().unwrap_or_default();
    let rows: Vec<Vec<String>> = sol
        .energies
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            vec![
                i.to_string(),
                fmt(e),
                labels.get(i).map(|&k| fmt(k)).unwrap_or_default(),
            ]
        })
        .collect();
    let mut out = OutputSet::new();
    out.add_csv("spectrum.csv", "index,energy,momentum", &rows);
    out.add("manifest.toml", manifest("oracle", config));
    Ok(out)
}

/// `twirl-odr`: noisy twirled evolution plus the same-shape identity
/// circuits, with decoherence renormalization of the electric field.
pub fn cmd_twirl_odr(config: &RunConfig, n_twirls: usize) -> Result<OutputSet> {
    if config.noise.p1 == 0.0 && config.noise.p2 == 0.0 {
        return Err(z2scatter::Error::Config(
            "twirl-odr requires a non-zero noise model".into(),
        ));
    }
    let resolved = resolve(config)?;
    let prep = build_preparation(config, &resolved, 0)?;
    let initial = initial_state(&resolved.params, prep.n_qubits);
    let step = build_trotter_step(
        &EvolutionPlan::new(config.evolution.dt, 1),
        &resolved.params,
        prep.n_qubits,
    );
    let ident = build_identity_step(
        &EvolutionPlan::new(config.evolution.dt, 1),
        &resolved.params,
        prep.n_qubits,
    );

    // Noiseless reference value E0 of the prepared state.
    let clean = run(&prep.circuit, &initial)?;
    let clean_counts = sample(&clean, config.shots.max(100_000), config.seed ^ 0xC1EA);
    let clean_report = filter_ancilla(&filter_q(&clean_counts, &resolved.params), &prep.accept);
    let e0 = electric_field(&clean_report.kept, &resolved.params)?;

    let measure_series = |use_identity: bool, out: &mut ObservableSeries| -> Result<()> {
        for step_index in 0..=config.evolution.n_steps {
            let t = config.evolution.dt * step_index as f64;
            let mut circuit = prep.circuit.clone();
            for _ in 0..step_index {
                circuit.append(if use_identity { &ident } else { &step });
            }
            // Shots split over independently twirled equivalents.
            let per = (config.noise.trajectories / n_twirls.max(1) as u64).max(1);
            let mut merged = ShotCounts::new(prep.n_qubits, config.seed);
            for v in 0..n_twirls.max(1) {
                let tag = (step_index as u64) << 12 | (v as u64) << 1 | u64::from(use_identity);
                let twirled = if config.noise.twirl && circuit.has_segment(segments::ELECTRIC) {
                    pauli_twirl(&circuit, segments::ELECTRIC, config.seed ^ tag)?
                } else {
                    circuit.clone()
                };
                let noise =
                    NoiseModel::new(config.noise.p1, config.noise.p2, config.seed ^ tag ^ 0xAB);
                let counts = run_noisy(&twirled, &initial, &noise, per)?;
                for (bits, n) in counts.iter() {
                    merged.record_many(bits, n);
                }
            }
            let report = filter_ancilla(&filter_q(&merged, &resolved.params), &prep.accept);
            let value = electric_field(&report.kept, &resolved.params)?;
            let err = bootstrap_errors(
                &report.kept,
                |c| electric_field(c, &resolved.params).unwrap_or(0.0),
                config.bootstrap_resamples,
                config.seed ^ (step_index as u64) << 3,
            );
            out.push(t, value, err);
        }
        Ok(())
    };

    let mut evolved = ObservableSeries::new("efield");
    let mut identity = ObservableSeries::new("efield_reference");
    measure_series(false, &mut evolved)?;
    measure_series(true, &mut identity)?;
    let odr = odr_rescale(&evolved, &identity, e0)?;

    let rows: Vec<Vec<String>> = (0..evolved.len())
        .map(|i| {
            vec![
                fmt(evolved.times[i]),
                fmt(evolved.values[i]),
                fmt(evolved.errors[i]),
                fmt(odr.values[i]),
                fmt(odr.errors[i]),
                fmt(identity.values[i]),
                fmt(identity.errors[i]),
            ]
        })
        .collect();
    let mut out = OutputSet::new();
    out.add_csv(
        "efield_odr.csv",
        "t,E,err,E_odr,err_odr,E_identity,err_identity",
        &rows,
    );
    out.add_csv("reference.csv", "E0", &[vec![fmt(e0)]]);
    out.add("manifest.toml", manifest("twirl-odr", config));
    Ok(out)
}

/// Convenience: published first-order suppression parameters for the
/// ten-site lattice, in ascending zone order.
pub fn reference_alphas_np5() -> AnsatzParams<f64> {
    let mut ap = AnsatzParams::empty(5);
    ap.push_order(0, -1.5139, -1.4590);
    ap.push_order(1, -1.0565, -1.0013);
    ap.push_order(2, -0.0957, 1.1112);
    ap.push_order(3, -3.2695, -3.0880);
    ap.push_order(4, -1.7754, 1.1020);
    ap
}

/// Published vacuum angles for the ten-site lattice.
pub fn reference_ground_np5() -> GroundStateAngles<f64> {
    GroundStateAngles::new(0.1705, 0.7846)
}
