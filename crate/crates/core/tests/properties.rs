use proptest::prelude::*;

use rabi_susy::io::table::{read_flow_csv, write_flow_csv};
use rabi_susy::linalg::{hermitian_eigvals, kron, unitary_exp, ComplexMatrix, C64};
use rabi_susy::model::{
    grading_operator, h_total_r, mass_increment, renormalized_frequency, Schedule,
};
use rabi_susy::spectral::{degeneracy_groups, FlowResult, FlowSource, SpectrumTable, SweepKind};
use rabi_susy::FockParams;

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| C64::new(re, im)).collect();
        ComplexMatrix::from_row_major(dim, data).unwrap()
    })
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim).prop_map(|m| m.hermitian_part())
}

fn diff_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(3), c in matrix(2)) {
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!(diff_norm(&left, &right) <= 1e-12);
    }

    #[test]
    fn unitary_exp_inverse(h in hermitian(6)) {
        let k = h.scale_c(C64::i());
        let u = unitary_exp(&k).unwrap();
        let v = unitary_exp(&k.scale(-1.0)).unwrap();
        prop_assert!(diff_norm(&u.matmul(&v), &ComplexMatrix::identity(6)) <= 1e-10);
        prop_assert!(diff_norm(&u.adjoint(), &v) <= 1e-10);
    }

    #[test]
    fn conjugation_preserves_trace_and_spectrum(h in hermitian(6), g in hermitian(6)) {
        let u = unitary_exp(&g.scale_c(C64::i())).unwrap();
        let moved = u.conjugate(&h);
        prop_assert!((moved.trace() - h.trace()).norm() <= 1e-10);
        let a = hermitian_eigvals(&h).unwrap();
        let b = hermitian_eigvals(&moved.hermitian_part()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn degeneracy_groups_shift_invariant(
        centres in prop::collection::vec(1.0..2.0f64, 1..5),
        sizes in prop::collection::vec(1usize..4, 5),
        shift in 0.0..0.01f64,
    ) {
        // well separated clusters so grouping cannot depend on rounding
        let mut energies = Vec::new();
        for (i, c) in centres.iter().enumerate() {
            let base = 10.0 * i as f64 + c;
            for j in 0..sizes[i] {
                energies.push(base + 1e-9 * j as f64);
            }
        }
        let a = degeneracy_groups(&energies, 1e-6);
        let shifted: Vec<f64> = energies.iter().map(|e| e + shift).collect();
        let b = degeneracy_groups(&shifted, 1e-6);
        prop_assert_eq!(&a, &b);
        let found: Vec<usize> = a.iter().map(|g| g.size).collect();
        prop_assert_eq!(found, sizes[..centres.len()].to_vec());
    }

    #[test]
    fn csv_round_trip_twelve_digits(
        grid in prop::collection::vec(-1e3..1e3f64, 2..5),
        mut energies in prop::collection::vec(-1e4..1e4f64, 1..6),
    ) {
        energies.sort_by(f64::total_cmp);
        let tables = grid
            .iter()
            .map(|x| SpectrumTable::new(energies.iter().map(|e| e + x).collect(), 1e-6, 64))
            .collect();
        let flow = FlowResult {
            grid: grid.clone(),
            tables,
            sweep_kind: SweepKind::GSweep,
            source: FlowSource::Coupling { omega: 1.0, c: 0.1 },
        };
        let mut out = Vec::new();
        write_flow_csv(&flow, &mut out).unwrap();
        let rows = read_flow_csv(out.as_slice()).unwrap();
        prop_assert_eq!(rows.len(), grid.len() * energies.len());
        for (i, row) in rows.iter().enumerate() {
            let x = grid[i / energies.len()];
            let e = energies[row.level_index] + x;
            prop_assert!((row.grid_value - x).abs() <= 1e-11 * x.abs().max(1e-300));
            prop_assert!((row.energy - e).abs() <= 1e-11 * e.abs().max(1e-300));
            prop_assert_eq!(row.sweep_kind.as_str(), "g_sweep");
        }
    }

    #[test]
    fn mass_increment_consistent(omega in 0.01..100.0f64, c in 0.0..10.0f64, g in 0.0..100.0f64) {
        let dm = mass_increment(omega, c, g);
        let (og, _) = renormalized_frequency(omega, c, g);
        prop_assert!(dm >= 0.0);
        prop_assert!(og >= omega);
        prop_assert!((og * og - omega * omega - dm * dm).abs() <= 1e-12 * og * og);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn h_total_r_is_continuous(c in 0.0..1.0f64, r in 0.0..0.999f64) {
        let fp = FockParams::new(24, 8).unwrap();
        let s = Schedule::new(6.2832, 6.2832, c).unwrap();
        let dr = 1e-7;
        let a = h_total_r(&s, r, &fp).unwrap();
        let b = h_total_r(&s, r + dr, &fp).unwrap();
        let jump = diff_norm(&a, &b);
        prop_assert!(jump <= 1e-3, "jump {jump} over dr {dr}");
    }

    #[test]
    fn fermion_number_expectation_bounded(
        re in prop::collection::vec(-1.0..1.0f64, 32),
        im in prop::collection::vec(-1.0..1.0f64, 32),
    ) {
        let fp = FockParams::new(16, 4).unwrap();
        let v: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
        let w = grading_operator(&fp).apply(&v);
        let nf: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&nf));
    }
}
