//! Stability verdicts and the inductive core, as a text report and a CSV.

use std::fmt::Write as _;

use bea_core::analytic::AnalyticGame;
use bea_core::stability::single_agreement;
use bea_core::{
    external_stability, inductive_core, internal_stability, joint_exit_deviations, PowerModel, UtilitySpec,
    UtilityTable,
};

use crate::error::CliResult;

pub struct Report {
    pub text: String,
    pub csv: String,
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn nums(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

pub fn analyse(game: &AnalyticGame, rho: f64) -> CliResult<Report> {
    let n = game.node_count();
    let spec = UtilitySpec::new(rho)?;
    let table = UtilityTable::build(
        &game.catalog,
        &game.positions,
        &PowerModel::for_geometry(&game.geometry),
        &spec,
    )?;
    let core = inductive_core(&game.catalog, &table)?;

    let mut text = String::new();
    let mut csv =
        String::from("structure,single_agreement,internally_stable,externally_stable,every_outsider_gains,in_core");
    for i in 1..=n {
        let _ = write!(csv, ",U{i}");
    }
    csv.push('\n');

    let _ = writeln!(text, "{n} nodes, rho = {rho}");
    for (cs, u) in table.iter() {
        let _ = writeln!(text, "[{cs}] utilities ({})", nums(u));
        let in_core = core.contains(cs);
        let (single, internal, external, every) = if single_agreement(cs).is_ok() {
            let iv = internal_stability(cs, &game.catalog, &table)?;
            let ev = external_stability(cs, &game.catalog, &table)?;
            for d in iv.blocking() {
                let _ = writeln!(
                    text,
                    "  MS{} gains by leaving to [{}]: {} -> {}",
                    d.deviators[0].0 + 1,
                    d.target,
                    nums(&d.before),
                    nums(&d.after)
                );
            }
            for d in joint_exit_deviations(cs, &game.catalog, &table)? {
                let who: Vec<String> = d.deviators.iter().map(|i| (i.0 + 1).to_string()).collect();
                let _ = writeln!(text, "  joint exit of {{{}}} to [{}] gains", who.join(","), d.target);
            }
            let _ = writeln!(
                text,
                "  internally stable: {}, externally stable: {}",
                yes(iv.internally_stable),
                yes(ev.externally_stable())
            );
            (
                "yes",
                yes(iv.internally_stable),
                yes(ev.externally_stable()),
                yes(ev.every_outsider_gains),
            )
        } else {
            ("no", "", "", "")
        };
        let _ = write!(csv, "{cs},{single},{internal},{external},{every},{}", yes(in_core));
        for x in u {
            let _ = write!(csv, ",{x}");
        }
        csv.push('\n');
    }

    let members: Vec<String> = core.members.iter().map(|(c, _)| format!("[{c}]")).collect();
    let _ = writeln!(text, "inductive core: {{{}}}", members.join(", "));
    for c in &core.certificates {
        let reaction: Vec<String> = c.reaction.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(
            text,
            "  [{}] dominated by {} forming a coalition, rest react with {} ({}): {} -> {}",
            c.dominated,
            c.deviators,
            if reaction.is_empty() {
                "nothing".to_string()
            } else {
                reaction.join("|")
            },
            if c.reaction_from_core {
                "residual core"
            } else {
                "any arrangement"
            },
            nums(&c.before),
            nums(&c.after)
        );
    }
    Ok(Report { text, csv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bea_core::analytic;

    #[test]
    fn three_node_verdicts() {
        let r = analyse(&analytic::three_node(), 0.5).unwrap();
        assert!(r.csv.contains("\n12|3,yes,yes,"));
        assert!(r.csv.contains("\n1|23,yes,no,"));
        assert!(r.csv.contains("\n13|2,yes,no,"));
        assert_eq!(r.csv.lines().count(), 6);
    }

    #[test]
    fn energy_dominated_rho() {
        let r = analyse(&analytic::three_node(), 0.01).unwrap();
        assert!(r.text.contains("inductive core"));
        assert!(analyse(&analytic::three_node(), 1.0).is_err());
    }
}
