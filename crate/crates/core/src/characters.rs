//! The Dirichlet character group mod q.
//!
//! Characters are represented by exponent vectors against fixed generators of
//! the unit group's cyclic components, one component per odd prime power and
//! the usual one-or-two components at powers of two. Discrete logarithms are
//! tabulated per component at group construction, so evaluation is a table
//! lookup plus one complex exponential with an exact rational angle.

use crate::arith::{self, Factorization};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Largest modulus for which discrete-log tables are built.
pub const MAX_MODULUS: u64 = 1_000_000;

/// One cyclic component of the unit group mod a prime power.
#[derive(Debug, Clone)]
pub struct Component {
    /// Prime of the prime-power modulus this component lives at.
    pub prime: u64,
    /// That prime power, `p^e`.
    pub modulus: u64,
    /// Generator of the component.
    pub generator: u64,
    /// Order of the generator.
    pub order: u64,
    /// dlog[u] for units u mod `modulus`; `u64::MAX` marks non-units.
    dlog: Vec<u64>,
}

impl Component {
    /// Discrete log of a residue coprime to `modulus`.
    #[inline]
    fn dlog(&self, residue: u64) -> u64 {
        self.dlog[residue as usize]
    }
}

/// The full character group mod q: unit-group structure plus dlog tables.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    q: u64,
    factorization: Factorization,
    components: Vec<Component>,
    /// lcm of the component orders (exponent of the group).
    exponent: u64,
}

impl CharacterGroup {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// phi(q), the group order.
    pub fn order(&self) -> u64 {
        arith::euler_phi(&self.factorization)
    }
}

/// Build the character group mod q with full discrete-log tables.
pub fn build_group(q: u64) -> Result<Arc<CharacterGroup>> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if q > MAX_MODULUS {
        return Err(Error::ModulusTooLarge(q, MAX_MODULUS));
    }
    let factorization = arith::factorize(q)?;
    let mut components = Vec::new();
    for &(p, e) in factorization.factors() {
        if p == 2 {
            match e {
                1 => {} // trivial unit group mod 2
                2 => components.push(cyclic_component(2, 4, 3, 2)),
                _ => {
                    let m = 1u64 << e;
                    let (minus_one, five) = two_power_components(m, e);
                    components.push(minus_one);
                    components.push(five);
                }
            }
        } else {
            let m = p.pow(e);
            let order = (p - 1) * p.pow(e - 1);
            let g = smallest_primitive_root(p, m, order);
            components.push(cyclic_component(p, m, g, order));
        }
    }
    let exponent = components.iter().fold(1u64, |acc, c| lcm(acc, c.order));
    let group = CharacterGroup { q, factorization, components, exponent };
    debug_assert_eq!(
        group.components.iter().map(|c| c.order).product::<u64>(),
        group.order()
    );
    Ok(Arc::new(group))
}

fn lcm(a: u64, b: u64) -> u64 {
    a / arith::gcd(a, b) * b
}

fn cyclic_component(prime: u64, modulus: u64, generator: u64, order: u64) -> Component {
    let mut dlog = vec![u64::MAX; modulus as usize];
    let mut acc = 1u64;
    for k in 0..order {
        debug_assert_eq!(dlog[acc as usize], u64::MAX);
        dlog[acc as usize] = k;
        acc = acc * generator % modulus;
    }
    debug_assert_eq!(acc, 1);
    Component { prime, modulus, generator, order, dlog }
}

/// The two components of (Z/2^e)* for e >= 3: {-1} of order 2 and {5} of
/// order 2^(e-2). Tables are filled jointly since every unit is uniquely
/// (-1)^s 5^k.
fn two_power_components(modulus: u64, e: u32) -> (Component, Component) {
    let half_order = 1u64 << (e - 2);
    let mut dlog_sign = vec![u64::MAX; modulus as usize];
    let mut dlog_five = vec![u64::MAX; modulus as usize];
    for s in 0..2u64 {
        let mut acc = if s == 0 { 1 } else { modulus - 1 };
        for k in 0..half_order {
            dlog_sign[acc as usize] = s;
            dlog_five[acc as usize] = k;
            acc = acc * 5 % modulus;
        }
    }
    (
        Component {
            prime: 2,
            modulus,
            generator: modulus - 1,
            order: 2,
            dlog: dlog_sign,
        },
        Component { prime: 2, modulus, generator: 5, order: half_order, dlog: dlog_five },
    )
}

/// Smallest primitive root mod an odd prime power, by direct search.
fn smallest_primitive_root(p: u64, modulus: u64, order: u64) -> u64 {
    let order_f = arith::factorize(order).expect("positive order");
    'candidate: for g in 2..modulus {
        if g % p == 0 {
            continue;
        }
        for ell in order_f.primes() {
            if pow_mod(g, order / ell, modulus) == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    unreachable!("odd prime powers always have primitive roots");
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// A Dirichlet character mod q, held as one exponent per group component.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exponents: Vec<u64>,
    parity: u8,
    conductor: u64,
    primitive: bool,
}

impl DirichletCharacter {
    /// Character of the given exponent vector (reduced mod component orders).
    pub fn from_exponents(group: &Arc<CharacterGroup>, exponents: &[u64]) -> Result<Self> {
        if exponents.len() != group.components.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} exponents for modulus {}, got {}",
                group.components.len(),
                group.q,
                exponents.len()
            )));
        }
        let exponents: Vec<u64> = exponents
            .iter()
            .zip(&group.components)
            .map(|(&e, c)| e % c.order)
            .collect();
        let parity = parity_of(group, &exponents);
        let conductor = conductor_of(group, &exponents);
        Ok(DirichletCharacter {
            group: Arc::clone(group),
            exponents,
            parity,
            conductor,
            primitive: conductor == group.q,
        })
    }

    pub fn q(&self) -> u64 {
        self.group.q
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// 0 for even characters (chi(-1) = 1), 1 for odd.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    /// Smallest f | q from which the character is induced.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// The conjugate character (exponents negated mod their orders).
    pub fn conjugate(&self) -> DirichletCharacter {
        let exponents: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(&e, c)| if e == 0 { 0 } else { c.order - e })
            .collect();
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents,
            parity: self.parity,
            conductor: self.conductor,
            primitive: self.primitive,
        }
    }

    pub fn is_real(&self) -> bool {
        self.exponents
            .iter()
            .zip(&self.group.components)
            .all(|(&e, c)| e == 0 || 2 * e == c.order)
    }

    /// External identifier `"q:e1,e2,..."`.
    pub fn id(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        format!("{}:{}", self.group.q, exps.join(","))
    }

    /// Parse an identifier produced by [`DirichletCharacter::id`].
    pub fn from_id(id: &str) -> Result<Self> {
        let (q_str, exp_str) = id
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("character id '{id}': missing ':'")))?;
        let q: u64 = q_str
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("character id '{id}': bad modulus")))?;
        let group = build_group(q)?;
        let exponents: Vec<u64> = if exp_str.is_empty() {
            vec![]
        } else {
            exp_str
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("character id '{id}': bad exponent '{s}'")))
                })
                .collect::<Result<_>>()?
        };
        Self::from_exponents(&group, &exponents)
    }

    /// chi(n): 0 off the units, otherwise the exact root of unity
    /// `exp(2 pi i * sum(e_c * dlog_c(n) / order_c))`.
    pub fn eval(&self, n: i64) -> Complex64 {
        match self.angle_numerator(n) {
            None => Complex64::new(0.0, 0.0),
            Some(0) => Complex64::new(1.0, 0.0),
            Some(num) => {
                let l = self.group.exponent as i64;
                if 2 * num == l {
                    return Complex64::new(-1.0, 0.0);
                }
                let angle = TAU * (num as f64) / (l as f64);
                Complex64::new(angle.cos(), angle.sin())
            }
        }
    }

    /// The character value as the numerator of the exact angle `num / exponent`
    /// of a full turn, reduced into `(-L/2, L/2]`; `None` off the units.
    fn angle_numerator(&self, n: i64) -> Option<i64> {
        let q = self.group.q;
        let r = n.rem_euclid(q as i64) as u64;
        if q == 1 {
            return Some(0);
        }
        if arith::gcd(r, q) != 1 {
            return None;
        }
        let l = self.group.exponent;
        let mut num = 0u64;
        for (c, &e) in self.group.components.iter().zip(&self.exponents) {
            let d = c.dlog(r % c.modulus);
            debug_assert_ne!(d, u64::MAX);
            // e * d * (L / order) mod L, in u128 to avoid overflow
            let term = (e as u128 * d as u128 % c.order as u128) * (l / c.order) as u128;
            num = ((num as u128 + term) % l as u128) as u64;
        }
        // symmetric reduction keeps the trig argument in (-pi, pi], which
        // makes conj(chi)(n) = conj(chi(n)) hold to the last bit
        if 2 * num > l {
            Some(num as i64 - l as i64)
        } else {
            Some(num as i64)
        }
    }

    /// A dense table of chi(r) for r in 0..q, for hot loops.
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.group.q as i64).map(|r| self.eval(r)).collect()
    }
}

fn parity_of(group: &CharacterGroup, exponents: &[u64]) -> u8 {
    if group.q <= 2 {
        return 0;
    }
    let l = group.exponent;
    let mut num = 0u64;
    for (c, &e) in group.components.iter().zip(exponents) {
        let minus_one = (group.q - 1) % c.modulus;
        let d = c.dlog(minus_one);
        let term = (e as u128 * d as u128 % c.order as u128) * (l / c.order) as u128;
        num = ((num as u128 + term) % l as u128) as u64;
    }
    // chi(-1) is +-1, so the angle numerator is 0 or L/2.
    debug_assert!(num == 0 || 2 * num == l);
    u8::from(num != 0)
}

/// Conductor from the per-component exponents: each component contributes the
/// smallest prime power on which its character is nontrivial, and these
/// multiply across distinct primes.
fn conductor_of(group: &CharacterGroup, exponents: &[u64]) -> u64 {
    let mut conductor = 1u64;
    let mut i = 0;
    while i < group.components.len() {
        let c = &group.components[i];
        if c.prime == 2 && i + 1 < group.components.len() && group.components[i + 1].prime == 2 {
            // 2^e with e >= 3: exponents (s on -1, k on 5)
            let s = exponents[i];
            let k = exponents[i + 1];
            let five = &group.components[i + 1];
            let local = if k != 0 {
                // level 2^(e - v2(k)): the 5-part is nontrivial exactly down
                // to that power of two
                let v = k.trailing_zeros();
                five.modulus >> v
            } else if s != 0 {
                4
            } else {
                1
            };
            conductor *= local;
            i += 2;
        } else {
            let e = exponents[i];
            let local = if e == 0 {
                1
            } else if c.prime == 2 {
                // the mod-4 component
                4
            } else {
                // odd p^a: the character g -> e(e/order) is trivial on the
                // subgroup of order p^j exactly when p^j divides e
                let mut m = c.modulus;
                let mut e_val = e;
                while e_val % c.prime == 0 && m > c.prime {
                    e_val /= c.prime;
                    m /= c.prime;
                }
                m
            };
            conductor *= local;
            i += 1;
        }
    }
    conductor
}

/// All characters mod q (or only the primitive ones), in deterministic
/// odometer order over exponent vectors.
pub fn enumerate_characters(
    group: &Arc<CharacterGroup>,
    primitive_only: bool,
) -> Vec<DirichletCharacter> {
    let orders: Vec<u64> = group.components.iter().map(|c| c.order).collect();
    let mut exps = vec![0u64; orders.len()];
    let mut out = Vec::new();
    loop {
        let chi = DirichletCharacter::from_exponents(group, &exps).expect("valid exponents");
        if !primitive_only || chi.is_primitive() {
            out.push(chi);
        }
        // odometer increment, last component fastest
        let mut i = orders.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// Gauss sum `sum over a mod q of chi(a) e(a/q)`, by compensated summation.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.q();
    let mut re = crate::numeric::KahanSum::new();
    let mut im = crate::numeric::KahanSum::new();
    for a in 1..=q {
        let c = chi.eval(a as i64);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let angle = TAU * (a as f64) / (q as f64);
        let e = Complex64::new(angle.cos(), angle.sin());
        let term = c * e;
        re.add(term.re);
        im.add(term.im);
    }
    Complex64::new(re.value(), im.value())
}
