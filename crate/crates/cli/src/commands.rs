use grk_core::grk::operator_word;
use grk_core::partitions::partition_count_with_cap;
use grk_core::tables::{reproduce, TableId};
use grk_core::{
    alpha_opt, ancilla_bits, eta_opt, full_state_simulate, implied_scaled_params,
    optimal_integer_schedule, optimal_real_schedule, run_grk, run_hierarchy, s_coeff, t_coeff,
    theorem_check, DatabaseGeometry, FinalOp, HierarchySpec, IterationSchedule, NegativeGlobalPolicy,
    Result,
};

use crate::output::{Cell, Document, Table};

/// Result of a command whose output must also pass a check.
pub type Checked = (Document, std::result::Result<(), String>);

pub fn simulate(
    n: u64,
    k: u64,
    schedule: Option<(f64, f64)>,
    final_op: FinalOp,
    full_vector_cap: u64,
) -> Result<Document> {
    let g = DatabaseGeometry::new(n, k)?;
    let schedule = match schedule {
        None => IterationSchedule {
            final_op,
            ..optimal_integer_schedule::<f64>(g)?
        },
        Some((j1, j2)) => IterationSchedule::new(j1, j2, final_op)?,
    };
    let r = run_grk(g, schedule)?;
    let implied = implied_scaled_params(g, schedule.j1, schedule.j2);
    let kf = k as f64;

    let full_vector_deviation = match schedule.counts() {
        Some((j1, j2)) if n <= full_vector_cap => {
            let word = operator_word(j1 as i64, j2, final_op);
            let full = full_state_simulate::<f64>(g, 0, &word, full_vector_cap)?;
            Some(full.project_to_symmetric()?.max_abs_diff(&r.final_state))
        }
        _ => None,
    };
    let s = r.final_state;
    Ok(Document {
        command: "simulate",
        summary: vec![
            ("n_items", n.into()),
            ("n_blocks", k.into()),
            ("block_size", g.block_size().into()),
            ("j1", schedule.j1.into()),
            ("j2", schedule.j2.into()),
            ("final_op", final_op.name().into()),
            ("closed_form", (!schedule.is_integral()).into()),
            ("amp_target", s.amp_target.into()),
            ("amp_target_rest", s.amp_target_rest.into()),
            ("amp_outside", s.amp_outside.into()),
            ("target_probability", (s.amp_target * s.amp_target).into()),
            ("target_block_probability", r.target_block_probability().into()),
            ("leaked_probability", r.leaked_probability.into()),
            ("queries_used", r.queries_used.into()),
            ("implied_alpha", implied.alpha.into()),
            ("implied_eta", implied.eta.into()),
            ("optimal_alpha", alpha_opt(kf)?.into()),
            ("optimal_eta", eta_opt(kf)?.into()),
            ("full_vector_max_deviation", full_vector_deviation.into()),
        ],
        table: None,
    })
}

pub fn schedule(n: u64, k: u64, final_op: FinalOp) -> Result<Document> {
    let g = DatabaseGeometry::new(n, k)?;
    let sqrt_n = (n as f64).sqrt();
    let mut table = Table::new(&[
        "kind",
        "j1",
        "j2",
        "queries",
        "queries_over_sqrt_n",
        "target_block_probability",
        "leaked_probability",
        "implied_alpha",
        "implied_eta",
    ]);
    let real = IterationSchedule {
        final_op,
        ..optimal_real_schedule::<f64>(g)?
    };
    let integer = IterationSchedule {
        final_op,
        ..optimal_integer_schedule::<f64>(g)?
    };
    for (kind, s) in [("real", real), ("integer", integer)] {
        let r = run_grk(g, s)?;
        let p = implied_scaled_params(g, s.j1, s.j2);
        table.push(vec![
            kind.into(),
            s.j1.into(),
            s.j2.into(),
            r.queries_used.into(),
            (r.queries_used / sqrt_n).into(),
            r.target_block_probability().into(),
            r.leaked_probability.into(),
            p.alpha.into(),
            p.eta.into(),
        ]);
    }
    Ok(Document {
        command: "schedule",
        summary: vec![
            ("n_items", n.into()),
            ("n_blocks", k.into()),
            ("optimal_coefficient", s_coeff(k as f64)?.value().into()),
        ],
        table: Some(table),
    })
}

pub fn hierarchy(n: u64, levels: Vec<u64>, policy: NegativeGlobalPolicy) -> Result<Document> {
    let spec = HierarchySpec::new(levels)?;
    let run = run_hierarchy::<f64>(n, &spec, policy)?;
    let mut table = Table::new(&[
        "level",
        "n_items",
        "n_blocks",
        "real_j1",
        "real_j2",
        "global_steps",
        "local_steps",
        "clamped",
        "oracle_calls",
        "signed_queries",
        "leaked_probability",
    ]);
    for (i, l) in run.per_level.iter().enumerate() {
        table.push(vec![
            ((i + 1) as u64).into(),
            l.geometry.n_items().into(),
            l.geometry.n_blocks().into(),
            l.real_j1.into(),
            l.real_j2.into(),
            l.global_steps.into(),
            l.local_steps.into(),
            l.clamped.into(),
            l.oracle_calls.into(),
            l.signed_queries.into(),
            l.leaked_probability.into(),
        ]);
    }
    table.push(vec![
        "total".into(),
        n.into(),
        spec.total_blocks()?.into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        run.total_oracle_calls.into(),
        run.total_signed_queries.into(),
        (1.0 - run.success_probability).into(),
    ]);
    let direct = &run.direct_equivalent;
    let sqrt_n = (n as f64).sqrt();
    Ok(Document {
        command: "hierarchy",
        summary: vec![
            ("levels", spec.to_string().into()),
            ("n_items", n.into()),
            ("success_probability", run.success_probability.into()),
            ("total_oracle_calls", run.total_oracle_calls.into()),
            ("total_signed_queries", run.total_signed_queries.into()),
            ("oracle_coefficient", run.oracle_coefficient().into()),
            ("signed_coefficient", run.signed_coefficient().into()),
            ("direct_queries", direct.queries_used.into()),
            ("direct_coefficient", (direct.queries_used / sqrt_n).into()),
            ("direct_success_probability", direct.target_block_probability().into()),
        ],
        table: Some(table),
    })
}

pub fn tables(which: TableId) -> Result<Checked> {
    let report = reproduce(which)?;
    let mut table = Table::new(&["row", "column", "computed", "reference", "deviation", "tolerance", "pass"]);
    for e in &report.entries {
        table.push(vec![
            e.row.clone().into(),
            e.column.clone().into(),
            e.computed.into(),
            e.reference.into(),
            e.deviation.into(),
            e.tolerance.into(),
            e.passes().into(),
        ]);
    }
    let failing = report.entries.iter().filter(|e| !e.passes()).count();
    let check = if failing == 0 {
        Ok(())
    } else {
        Err(format!("{failing} entries of {which} exceed their tolerance"))
    };
    let doc = Document {
        command: "tables",
        summary: vec![
            ("table", which.name().into()),
            ("max_deviation", report.max_deviation().into()),
            ("passes", report.passes().into()),
        ],
        table: Some(table),
    };
    Ok((doc, check))
}

pub fn sweep(k1s: impl Iterator<Item = u64>, k2s: impl Iterator<Item = u64> + Clone) -> Result<Checked> {
    let mut table = Table::new(&["k1", "k2", "S", "T", "gap", "lemma1_term", "lemma2_term"]);
    let mut bad = Vec::new();
    for k1 in k1s {
        for k2 in k2s.clone() {
            let (a, b) = (k1 as f64, k2 as f64);
            let d = theorem_check(a, b)?;
            if !d.holds {
                bad.push(format!("({k1},{k2})"));
            }
            table.push(vec![
                k1.into(),
                k2.into(),
                s_coeff(a * b)?.value().into(),
                t_coeff(a, b)?.value().into(),
                d.gap.into(),
                d.lemma1_terms.iter().sum::<f64>().into(),
                d.lemma2_term.into(),
            ]);
        }
    }
    let check = if bad.is_empty() {
        Ok(())
    } else {
        Err(format!("gap or one of its terms not positive at {}", bad.join(", ")))
    };
    let doc = Document {
        command: "sweep",
        summary: vec![("cells", (table.rows.len() as u64).into())],
        table: Some(table),
    };
    Ok((doc, check))
}

pub fn partitions(n: u64, k: u64, exact_cap: u64) -> Result<Document> {
    let count = partition_count_with_cap(n, k, exact_cap)?;
    let bits = ancilla_bits(n, k)?;
    let mut table = Table::new(&[
        "n_items",
        "n_blocks",
        "exact_count",
        "log2_count",
        "ancilla_bits",
        "ancilla_bits_from_exact_count",
        "ancilla_bits_asymptotic",
    ]);
    table.push(vec![
        n.into(),
        k.into(),
        count.exact.map(|c| c.to_string()).into(),
        count.log2_value.into(),
        bits.exact_bits.into(),
        bits.from_exact_count.into(),
        bits.asymptotic_bits.into(),
    ]);
    Ok(Document {
        command: "partitions",
        summary: vec![],
        table: Some(table),
    })
}
