use proptest::prelude::*;

use naming_game::conceptual::CategoryId;
use naming_game::lexicon::{ConstructionInventory, Role};

const FORMS: [&str; 4] = ["fusemo", "sobele", "ponuro", "rilala"];

#[derive(Debug, Clone)]
enum Op {
    Add(usize, u32, f64),
    Reward(usize, Role, f64, f64),
    Punish(usize, f64),
}

fn op() -> impl Strategy<Value = Op> {
    let role = prop_oneof![Just(Role::Speaker), Just(Role::Hearer)];
    prop_oneof![
        (0..4usize, 0..4u32, 0.01..=1.0f64).prop_map(|(f, c, s)| Op::Add(f, c, s)),
        (any::<usize>(), role, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(i, r, a, b)| Op::Reward(i, r, a, b)),
        (any::<usize>(), 0.0..=1.0f64).prop_map(|(i, d)| Op::Punish(i, d)),
    ]
}

fn pick(inv: &ConstructionInventory, i: usize) -> Option<(String, CategoryId)> {
    let all = inv.constructions();
    (!all.is_empty()).then(|| {
        let c = &all[i % all.len()];
        (c.form.clone(), c.category_id)
    })
}

proptest! {
    #[test]
    fn scores_stay_in_unit_interval(ops in prop::collection::vec(op(), 0..60)) {
        let mut inv = ConstructionInventory::new();
        for op in ops {
            match op {
                Op::Add(f, c, s) => {
                    let _ = inv.add_construction(FORMS[f], CategoryId(c), s);
                }
                Op::Reward(i, role, inc, inh) => {
                    if let Some((form, cat)) = pick(&inv, i) {
                        inv.reward_and_inhibit(&form, cat, role, inc, inh).unwrap();
                    }
                }
                Op::Punish(i, dec) => {
                    if let Some((form, cat)) = pick(&inv, i) {
                        inv.punish(&form, cat, dec).unwrap();
                    }
                }
            }
            for c in inv.constructions() {
                prop_assert!(c.score > 0.0 && c.score <= 1.0, "{c:?}");
            }
        }
    }

    #[test]
    fn inhibition_only_touches_role_competitors(
        entries in prop::collection::btree_map((0..4usize, 0..4u32), 0.05..=1.0f64, 1..12),
        pick_index in any::<usize>(),
        speaker in any::<bool>(),
    ) {
        let mut inv = ConstructionInventory::new();
        for (&(f, c), &s) in &entries {
            inv.add_construction(FORMS[f], CategoryId(c), s).unwrap();
        }
        let before = inv.clone();
        let (form, cat) = pick(&inv, pick_index).unwrap();
        let role = if speaker { Role::Speaker } else { Role::Hearer };
        inv.reward_and_inhibit(&form, cat, role, 0.1, 0.1).unwrap();
        for old in before.constructions() {
            let related = match role {
                Role::Speaker => old.category_id == cat,
                Role::Hearer => old.form == form,
            };
            if !related {
                prop_assert_eq!(inv.get(&old.form, old.category_id), Some(old));
            }
        }
    }

    #[test]
    fn produce_returns_dominant_new_construction(
        others in prop::collection::vec((0..3usize, 0.01..0.5f64), 0..6),
        score in 0.5..=1.0f64,
    ) {
        let mut inv = ConstructionInventory::new();
        for (f, s) in &others {
            let _ = inv.add_construction(FORMS[*f], CategoryId(7), *s);
        }
        inv.add_construction("rilala", CategoryId(7), score).unwrap();
        prop_assert_eq!(&inv.produce(CategoryId(7)).unwrap().form, "rilala");
    }

    #[test]
    fn punishment_removes_after_ceil_steps(score in 0.05..=1.0f64, dec in 0.05..=0.5f64) {
        let mut inv = ConstructionInventory::new();
        inv.add_construction("fusemo", CategoryId(0), score).unwrap();
        let expected = (score / dec).ceil() as usize;
        let mut sizes = vec![inv.len()];
        let mut steps = 0;
        while inv.get("fusemo", CategoryId(0)).is_some() {
            inv.punish("fusemo", CategoryId(0), dec).unwrap();
            sizes.push(inv.len());
            steps += 1;
        }
        prop_assert!(sizes.windows(2).all(|w| w[1] <= w[0]));
        let ratio = score / dec;
        if (ratio - ratio.round()).abs() > 1e-6 {
            prop_assert_eq!(steps, expected);
        } else {
            // Exact multiples: removal after exactly ratio steps.
            prop_assert_eq!(steps, ratio.round() as usize);
        }
    }
}
