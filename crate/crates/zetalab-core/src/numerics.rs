//! Low-level numerical building blocks: compensated summation, double-double
//! arithmetic for phase accumulation, and the Bernoulli number table shared by
//! the Stirling and Euler-Maclaurin expansions.

/// Bernoulli numbers `B_{2k}` for `k = 1..=30`, i.e. `B_2, B_4, ..., B_60`.
///
/// Entry `k - 1` holds `B_{2k}`. Values are correctly rounded doubles of the
/// exact rationals.
pub const BERNOULLI_2K: [f64; 30] = [
    0.166_666_666_666_666_67,     // B_2  = 1/6
    -0.033_333_333_333_333_333,   // B_4  = -1/30
    0.023_809_523_809_523_810,    // B_6  = 1/42
    -0.033_333_333_333_333_333,   // B_8  = -1/30
    0.075_757_575_757_575_758,    // B_10 = 5/66
    -0.253_113_553_113_553_11,    // B_12 = -691/2730
    1.166_666_666_666_666_7,      // B_14 = 7/6
    -7.092_156_862_745_098_0,     // B_16 = -3617/510
    54.971_177_944_862_155,       // B_18 = 43867/798
    -529.124_242_424_242_42,      // B_20 = -174611/330
    6_192.123_188_405_797_1,      // B_22 = 854513/138
    -86_580.253_113_553_114,      // B_24 = -236364091/2730
    1_425_517.166_666_666_7,      // B_26 = 8553103/6
    -27_298_231.067_816_092,      // B_28 = -23749461029/870
    601_580_873.900_642_37,       // B_30
    -15_116_315_767.092_157,      // B_32
    429_614_643_061.166_67,       // B_34
    -13_711_655_205_088.333,      // B_36
    488_332_318_973_593.17,       // B_38
    -1.929_657_934_194_006_8e16,  // B_40
    8.416_930_475_736_826_2e17,   // B_42
    -4.033_807_185_405_945_5e19,  // B_44
    2.115_074_863_808_199_2e21,   // B_46
    -1.208_662_652_229_652_6e23,  // B_48
    7.500_866_746_076_964_4e24,   // B_50
    -5.038_778_101_481_068_9e26,  // B_52
    3.652_877_648_481_812_3e28,   // B_54
    -2.849_876_930_245_088_2e30,  // B_56
    2.386_542_749_968_362_8e32,   // B_58
    -2.139_994_925_722_533_4e34,  // B_60
];

/// `2*pi` as an unevaluated double-double sum `TWO_PI_HI + TWO_PI_LO`,
/// accurate to about 32 decimal digits. Used when reducing large phases
/// modulo `2*pi`.
pub const TWO_PI_HI: f64 = 6.283_185_307_179_586;
pub const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Kahan (compensated) accumulator for long sums of doubles.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Error-free transformation: `a + b = s + e` exactly, with `s = fl(a + b)`.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free transformation for products via fused multiply-add:
/// `a * b = p + e` exactly, with `p = fl(a * b)`.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
///
/// Only the handful of operations needed for phase bookkeeping are
/// implemented; this is not a general extended-precision type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let lo = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        self.add(Dd::from_f64(x))
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    /// Product with a double, keeping the double-double error term.
    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let lo = self.lo.mul_add(x, e);
        let (hi, lo) = two_sum(p, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Reduce into `(-pi, pi]` modulo `2*pi`, done in double-double so the
    /// result stays accurate even when `hi` is of order `1e12`.
    pub fn rem_two_pi(self) -> f64 {
        let q = (self.to_f64() / TWO_PI_HI).round();
        let r = self
            .sub(Dd::from_prod(q, TWO_PI_HI))
            .sub(Dd::from_prod(q, TWO_PI_LO));
        let mut x = r.to_f64();
        // One correction pass in case the first rounding left us just
        // outside the target interval.
        while x > std::f64::consts::PI {
            x -= TWO_PI_HI;
        }
        while x <= -std::f64::consts::PI {
            x += TWO_PI_HI;
        }
        x
    }
}
