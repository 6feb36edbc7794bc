//! Exact symbolic algebra for Bell labels, single-qubit Paulis and the four
//! prepared states used by the summation protocol.

use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A classical bit. XOR is the only arithmetic defined on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub const fn new(value: bool) -> Self {
        Bit(value)
    }

    pub const fn is_one(self) -> bool {
        self.0
    }

    pub const fn as_u8(self) -> u8 {
        self.0 as u8
    }

    /// Interprets any integer by its low bit.
    pub const fn from_low_bit(v: u64) -> Self {
        Bit(v & 1 == 1)
    }
}

impl BitXor for Bit {
    type Output = Bit;

    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl From<bool> for Bit {
    fn from(v: bool) -> Self {
        Bit(v)
    }
}

impl From<Bit> for bool {
    fn from(b: Bit) -> Self {
        b.0
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            other => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {other}"))),
        }
    }
}

/// XOR-fold of an iterator of bits.
pub fn xor_all<I: IntoIterator<Item = Bit>>(bits: I) -> Bit {
    bits.into_iter().fold(Bit::ZERO, |acc, b| acc ^ b)
}

/// Two-bit name `xy` of the Bell state `|B_xy> = (|0,x> + (-1)^y |1,x^1>)/sqrt(2)`.
///
/// Component-wise XOR makes the four labels a group isomorphic to Z2 x Z2.
/// Serialized as a two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BellLabel {
    pub x: Bit,
    pub y: Bit,
}

impl BellLabel {
    pub const PHI_PLUS: BellLabel = BellLabel::new(Bit::ZERO, Bit::ZERO);

    pub const ALL: [BellLabel; 4] = [
        BellLabel::new(Bit::ZERO, Bit::ZERO),
        BellLabel::new(Bit::ZERO, Bit::ONE),
        BellLabel::new(Bit::ONE, Bit::ZERO),
        BellLabel::new(Bit::ONE, Bit::ONE),
    ];

    pub const fn new(x: Bit, y: Bit) -> Self {
        BellLabel { x, y }
    }

    pub const fn from_bits(x: u8, y: u8) -> Self {
        BellLabel::new(Bit::new(x & 1 == 1), Bit::new(y & 1 == 1))
    }

    /// Dense index `2x + y`, matching the order of [`BellLabel::ALL`].
    pub const fn index(self) -> usize {
        ((self.x.as_u8() as usize) << 1) | self.y.as_u8() as usize
    }

    pub const fn from_index(i: usize) -> Self {
        BellLabel::from_bits((i >> 1) as u8, i as u8)
    }
}

impl BitXor for BellLabel {
    type Output = BellLabel;

    fn bitxor(self, rhs: BellLabel) -> BellLabel {
        BellLabel::new(self.x ^ rhs.x, self.y ^ rhs.y)
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.x, self.y)
    }
}

impl Serialize for BellLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for BellLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[Bit; 2]>::deserialize(d)?;
        Ok(BellLabel::new(x, y))
    }
}

/// Single-qubit Pauli operator in canonical form `i^phase * Z^z * X^x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliOp {
    phase: u8,
    pub z: Bit,
    pub x: Bit,
}

impl PauliOp {
    pub const IDENTITY: PauliOp = PauliOp::new(0, Bit::ZERO, Bit::ZERO);
    pub const X: PauliOp = PauliOp::new(0, Bit::ZERO, Bit::ONE);
    pub const Z: PauliOp = PauliOp::new(0, Bit::ONE, Bit::ZERO);
    /// The encoding unitary `U = ZX`.
    pub const U: PauliOp = PauliOp::new(0, Bit::ONE, Bit::ONE);

    pub const fn new(phase: u8, z: Bit, x: Bit) -> Self {
        PauliOp { phase: phase & 3, z, x }
    }

    /// `Z^z X^x` with no phase.
    pub const fn zx(z: Bit, x: Bit) -> Self {
        PauliOp::new(0, z, x)
    }

    /// Exponent of the imaginary unit, in `0..4`.
    pub const fn phase(self) -> u8 {
        self.phase
    }

    /// Multiplies the operator by `i^k`.
    pub const fn shift_phase(self, k: u8) -> Self {
        PauliOp::new(self.phase.wrapping_add(k & 3), self.z, self.x)
    }

    /// `U^m`, returned as identity for `m = 0`.
    pub const fn u_pow(m: Bit) -> Self {
        if m.is_one() {
            PauliOp::U
        } else {
            PauliOp::IDENTITY
        }
    }

    /// The product `self * other` (`other` acts first).
    pub fn compose(self, other: PauliOp) -> PauliOp {
        pauli_compose(self, other)
    }

    pub fn pow(self, k: u32) -> PauliOp {
        (0..k).fold(PauliOp::IDENTITY, |acc, _| acc.compose(self))
    }

    /// Equal as operators up to an overall phase.
    pub fn eq_up_to_phase(self, other: PauliOp) -> bool {
        self.z == other.z && self.x == other.x
    }

    /// All 16 operators.
    pub fn all() -> impl Iterator<Item = PauliOp> {
        (0u8..4).flat_map(|p| (0u8..4).map(move |zx| PauliOp::new(p, Bit::new(zx & 2 != 0), Bit::new(zx & 1 != 0))))
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        let body = match (self.z.is_one(), self.x.is_one()) {
            (false, false) => "I",
            (true, false) => "Z",
            (false, true) => "X",
            (true, true) => "ZX",
        };
        write!(f, "{prefix}{body}")
    }
}

/// Canonical form of `p * q`.
///
/// Moving `X^{p.x}` past `Z^{q.z}` costs `(-1)^{p.x * q.z}`.
pub fn pauli_compose(p: PauliOp, q: PauliOp) -> PauliOp {
    let anticommute = (p.x.as_u8() & q.z.as_u8()) * 2;
    PauliOp::new(p.phase + q.phase + anticommute, p.z ^ q.z, p.x ^ q.x)
}

/// Residual operator `Z^{bsm.y ^ link.y} X^{bsm.x ^ link.x}` left on the output
/// qubit of a teleportation hop. The `(-1)^{b*x}` global phase is dropped.
pub fn pauli_from_teleport_hop(link: BellLabel, bsm: BellLabel) -> PauliOp {
    PauliOp::zx(bsm.y ^ link.y, bsm.x ^ link.x)
}

/// Measurement basis for single-qubit measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasBasis {
    Computational,
    Diagonal,
}

impl MeasBasis {
    pub const ALL: [MeasBasis; 2] = [MeasBasis::Computational, MeasBasis::Diagonal];
}

/// One of `|0>, |1>, |+>, |->`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreparedState {
    Zero,
    One,
    Plus,
    Minus,
}

impl PreparedState {
    pub const ALL: [PreparedState; 4] =
        [PreparedState::Zero, PreparedState::One, PreparedState::Plus, PreparedState::Minus];

    pub const fn basis(self) -> MeasBasis {
        match self {
            PreparedState::Zero | PreparedState::One => MeasBasis::Computational,
            PreparedState::Plus | PreparedState::Minus => MeasBasis::Diagonal,
        }
    }

    pub const fn e_bit(self) -> Bit {
        match self {
            PreparedState::Zero | PreparedState::Plus => Bit::ZERO,
            PreparedState::One | PreparedState::Minus => Bit::ONE,
        }
    }

    /// The eigenstate of `basis` whose measurement reads `outcome`.
    pub const fn from_basis_outcome(basis: MeasBasis, outcome: Bit) -> Self {
        match (basis, outcome.is_one()) {
            (MeasBasis::Computational, false) => PreparedState::Zero,
            (MeasBasis::Computational, true) => PreparedState::One,
            (MeasBasis::Diagonal, false) => PreparedState::Plus,
            (MeasBasis::Diagonal, true) => PreparedState::Minus,
        }
    }

    pub const fn from_index(i: usize) -> Self {
        PreparedState::ALL[i & 3]
    }
}

/// `E(s)`: 0 for `|0>`, `|+>`; 1 for `|1>`, `|->`.
pub fn encode_e(s: PreparedState) -> Bit {
    s.e_bit()
}

fn apply_x(s: PreparedState) -> (PreparedState, u8) {
    match s {
        PreparedState::Zero => (PreparedState::One, 0),
        PreparedState::One => (PreparedState::Zero, 0),
        PreparedState::Plus => (PreparedState::Plus, 0),
        PreparedState::Minus => (PreparedState::Minus, 2),
    }
}

fn apply_z(s: PreparedState) -> (PreparedState, u8) {
    match s {
        PreparedState::Zero => (PreparedState::Zero, 0),
        PreparedState::One => (PreparedState::One, 2),
        PreparedState::Plus => (PreparedState::Minus, 0),
        PreparedState::Minus => (PreparedState::Plus, 0),
    }
}

/// Applies `p` to a prepared state, returning the image and the accumulated
/// phase exponent (a power of `i`). Both bases are closed under Paulis.
pub fn apply_pauli_to_prepared(p: PauliOp, s: PreparedState) -> (PreparedState, u8) {
    let mut phase = p.phase;
    let mut state = s;
    if p.x.is_one() {
        let (next, ph) = apply_x(state);
        state = next;
        phase += ph;
    }
    if p.z.is_one() {
        let (next, ph) = apply_z(state);
        state = next;
        phase += ph;
    }
    (state, phase & 3)
}

/// Outer-pair label after a Bell measurement joins two Bell pairs.
pub fn entanglement_swap(outer_left: BellLabel, outer_right: BellLabel, bsm: BellLabel) -> BellLabel {
    outer_left ^ outer_right ^ bsm
}

/// Relation between the two bits of a same-basis measurement of a Bell pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Same,
    Opposite,
}

impl Parity {
    pub fn of(a: Bit, b: Bit) -> Self {
        if a == b {
            Parity::Same
        } else {
            Parity::Opposite
        }
    }

    pub fn as_bit(self) -> Bit {
        Bit::new(self == Parity::Opposite)
    }
}

/// Expected parity when both halves of `|B_label>` are measured in `basis`.
pub fn correlation_expected(label: BellLabel, basis: MeasBasis) -> Parity {
    let flip = match basis {
        MeasBasis::Computational => label.x,
        MeasBasis::Diagonal => label.y,
    };
    if flip.is_one() {
        Parity::Opposite
    } else {
        Parity::Same
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type M2 = [[Complex64; 2]; 2];

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat_mul(a: &M2, b: &M2) -> M2 {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    fn mat_close(a: &M2, b: &M2) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < 1e-12))
    }

    // Independent 2x2 matrix model of the canonical form.
    fn matrix(p: PauliOp) -> M2 {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let x: M2 = [[zero, one], [one, zero]];
        let z: M2 = [[one, zero], [zero, -one]];
        let id: M2 = [[one, zero], [zero, one]];
        let mut m = id;
        if p.z.is_one() {
            m = mat_mul(&m, &z);
        }
        if p.x.is_one() {
            m = mat_mul(&m, &x);
        }
        let ph = c(0.0, 1.0).powu(p.phase() as u32);
        [[m[0][0] * ph, m[0][1] * ph], [m[1][0] * ph, m[1][1] * ph]]
    }

    #[test]
    fn compose_matches_matrix_product_exhaustively() {
        for p in PauliOp::all() {
            for q in PauliOp::all() {
                let expected = mat_mul(&matrix(p), &matrix(q));
                assert!(mat_close(&matrix(pauli_compose(p, q)), &expected), "{p} * {q}");
            }
        }
    }

    #[test]
    fn compose_examples() {
        assert_eq!(pauli_compose(PauliOp::Z, PauliOp::X), PauliOp::new(0, Bit::ONE, Bit::ONE));
        assert_eq!(pauli_compose(PauliOp::X, PauliOp::Z), PauliOp::new(2, Bit::ONE, Bit::ONE));
        let lhs = pauli_compose(PauliOp::U, PauliOp::X);
        let rhs = pauli_compose(PauliOp::X, PauliOp::U).shift_phase(2);
        assert_eq!(lhs, PauliOp::Z);
        assert_eq!(rhs, PauliOp::Z);
    }

    #[test]
    fn group_laws() {
        for p in PauliOp::all() {
            assert_eq!(p.compose(PauliOp::IDENTITY), p);
            assert_eq!(PauliOp::IDENTITY.compose(p), p);
            assert_eq!(p.pow(4), PauliOp::IDENTITY);
            for q in PauliOp::all() {
                for r in PauliOp::all() {
                    assert_eq!(p.compose(q).compose(r), p.compose(q.compose(r)));
                }
            }
        }
        let u2 = PauliOp::U.compose(PauliOp::U);
        assert_eq!((u2.phase(), u2.z, u2.x), (2, Bit::ZERO, Bit::ZERO));
    }

    #[test]
    fn u_commutes_past_pauli_with_sign_a_xor_b() {
        for a in [Bit::ZERO, Bit::ONE] {
            for b in [Bit::ZERO, Bit::ONE] {
                let p = PauliOp::zx(b, a);
                let shift = 2 * (a ^ b).as_u8();
                assert_eq!(pauli_compose(PauliOp::U, p), pauli_compose(p, PauliOp::U).shift_phase(shift));
            }
        }
    }

    #[test]
    fn teleport_hop_examples() {
        let l = BellLabel::from_bits;
        assert_eq!(pauli_from_teleport_hop(l(0, 0), l(0, 0)), PauliOp::IDENTITY);
        assert_eq!(pauli_from_teleport_hop(l(0, 0), l(1, 0)), PauliOp::X);
        assert_eq!(pauli_from_teleport_hop(l(1, 1), l(0, 1)), PauliOp::X);
    }

    #[test]
    fn u_on_prepared_states() {
        use PreparedState::*;
        assert_eq!(apply_pauli_to_prepared(PauliOp::U, Zero), (One, 2));
        assert_eq!(apply_pauli_to_prepared(PauliOp::U, One), (Zero, 0));
        assert_eq!(apply_pauli_to_prepared(PauliOp::U, Plus), (Minus, 0));
        assert_eq!(apply_pauli_to_prepared(PauliOp::U, Minus), (Plus, 2));
        assert_eq!(apply_pauli_to_prepared(PauliOp::X, Plus), (Plus, 0));
        assert_eq!(apply_pauli_to_prepared(PauliOp::Z, Plus), (Minus, 0));
    }

    #[test]
    fn prepared_state_action_matches_matrices() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let vec_of = |s: PreparedState| -> [Complex64; 2] {
            match s {
                PreparedState::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
                PreparedState::One => [c(0.0, 0.0), c(1.0, 0.0)],
                PreparedState::Plus => [c(h, 0.0), c(h, 0.0)],
                PreparedState::Minus => [c(h, 0.0), c(-h, 0.0)],
            }
        };
        for p in PauliOp::all() {
            for s in PreparedState::ALL {
                let m = matrix(p);
                let v = vec_of(s);
                let got = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
                let (t, ph) = apply_pauli_to_prepared(p, s);
                let w = vec_of(t);
                let k = c(0.0, 1.0).powu(ph as u32);
                assert!((got[0] - k * w[0]).norm() < 1e-12 && (got[1] - k * w[1]).norm() < 1e-12);
                assert_eq!(t.basis(), s.basis());
            }
        }
    }

    #[test]
    fn e_encoding() {
        assert_eq!(encode_e(PreparedState::Zero), Bit::ZERO);
        assert_eq!(encode_e(PreparedState::Minus), Bit::ONE);
        for s in PreparedState::ALL {
            for m in [Bit::ZERO, Bit::ONE] {
                let (t, _) = apply_pauli_to_prepared(PauliOp::u_pow(m), s);
                assert_eq!(encode_e(t), encode_e(s) ^ m);
            }
        }
    }

    #[test]
    fn swap_and_correlation_examples() {
        let l = BellLabel::from_bits;
        assert_eq!(entanglement_swap(l(0, 0), l(0, 0), l(1, 0)), l(1, 0));
        assert_eq!(entanglement_swap(l(0, 1), l(1, 0), l(1, 1)), l(0, 0));
        assert_eq!(correlation_expected(l(0, 0), MeasBasis::Computational), Parity::Same);
        assert_eq!(correlation_expected(l(1, 1), MeasBasis::Diagonal), Parity::Opposite);
        assert_eq!(correlation_expected(l(1, 0), MeasBasis::Diagonal), Parity::Same);
    }

    #[test]
    fn label_serde_shape() {
        let s = serde_json::to_string(&BellLabel::from_bits(1, 0)).unwrap();
        assert_eq!(s, "[1,0]");
        let back: BellLabel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, BellLabel::from_bits(1, 0));
        assert!(serde_json::from_str::<BellLabel>("[2,0]").is_err());
    }

    #[test]
    fn label_index_roundtrip() {
        for (i, l) in BellLabel::ALL.iter().enumerate() {
            assert_eq!(l.index(), i);
            assert_eq!(BellLabel::from_index(i), *l);
        }
    }
}
