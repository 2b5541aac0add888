//! Random small bit-vector systems, emitted directly as VMT-LIB text.
//!
//! States: `a` (3 bits), `b` (2 bits), `f` (Bool). Inputs: `i` (1 bit),
//! `c` (Bool).

use rand::Rng;

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    inputs: bool,
}

impl<R: Rng> Gen<'_, R> {
    fn leaf(&mut self, w: u32) -> String {
        let mut pool: Vec<String> = Vec::new();
        match w {
            3 => pool.push("a".into()),
            2 => pool.push("b".into()),
            1 if self.inputs => pool.push("i".into()),
            _ => {}
        }
        if w < 3 {
            pool.push(format!("((_ extract {} 0) a)", w - 1));
        }
        if w > 2 {
            pool.push(format!("((_ zero_extend {}) b)", w - 2));
        }
        if pool.is_empty() || self.rng.gen_ratio(1, 4) {
            return format!("(_ bv{} {})", self.rng.gen_range(0..1u32 << w), w);
        }
        pool.swap_remove(self.rng.gen_range(0..pool.len()))
    }

    fn bv(&mut self, w: u32, depth: u32) -> String {
        if depth == 0 || self.rng.gen_ratio(1, 4) {
            return self.leaf(w);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..12) {
            0 => format!("(bvnot {})", self.bv(w, d)),
            1 => format!("(bvneg {})", self.bv(w, d)),
            2 => format!("(ite {} {} {})", self.boolean(d), self.bv(w, d), self.bv(w, d)),
            3 if w >= 2 => {
                let hi = self.rng.gen_range(1..w);
                format!("(concat {} {})", self.bv(hi, d), self.bv(w - hi, d))
            }
            4 if w < 3 => format!("((_ extract {} 1) {})", w, self.bv(3, d)),
            5 => format!("(bvudiv {} {})", self.bv(w, d), self.bv(w, d)),
            6 => format!("(bvurem {} {})", self.bv(w, d), self.bv(w, d)),
            _ => {
                let op = ["bvadd", "bvsub", "bvand", "bvor", "bvxor", "bvmul", "bvshl", "bvlshr"]
                    [self.rng.gen_range(0..8)];
                format!("({} {} {})", op, self.bv(w, d), self.bv(w, d))
            }
        }
    }

    fn boolean(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_ratio(1, 5) {
            return match self.rng.gen_range(0..3) {
                0 => "f".into(),
                1 if self.inputs => "c".into(),
                _ => format!("(= {} #b1)", self.leaf(1)),
            };
        }
        let d = depth - 1;
        let w = self.rng.gen_range(1..=3);
        match self.rng.gen_range(0..8) {
            0 => format!("(not {})", self.boolean(d)),
            1 => format!("(and {} {})", self.boolean(d), self.boolean(d)),
            2 => format!("(or {} {})", self.boolean(d), self.boolean(d)),
            3 => format!("(= {} {})", self.bv(w, d), self.bv(w, d)),
            4 => format!("(distinct {} {})", self.bv(w, d), self.bv(w, d)),
            _ => {
                let op = ["bvult", "bvule", "bvslt", "bvsge", "bvugt"][self.rng.gen_range(0..5)];
                format!("({} {} {})", op, self.bv(w, d), self.bv(w, d))
            }
        }
    }
}

/// A random system with two invariant properties (indices 0 and 1).
pub fn random_bv_system(rng: &mut impl Rng) -> String {
    let mut out = String::from(
        "(declare-fun a () (_ BitVec 3))\n(declare-fun a.next () (_ BitVec 3))\n\
         (declare-fun b () (_ BitVec 2))\n(declare-fun b.next () (_ BitVec 2))\n\
         (declare-fun f () Bool)\n(declare-fun f.next () Bool)\n\
         (declare-fun i () (_ BitVec 1))\n(declare-fun c () Bool)\n\
         (define-fun sv.a () (_ BitVec 3) (! a :next a.next))\n\
         (define-fun sv.b () (_ BitVec 2) (! b :next b.next))\n\
         (define-fun sv.f () Bool (! f :next f.next))\n",
    );
    let relational_init = rng.gen_bool(0.3);
    let relational_trans = rng.gen_bool(0.3);
    let mut g = Gen { rng, inputs: false };
    let init = if relational_init {
        format!("(and (bvule a #b{:03b}) {})", g.rng.gen_range(0..8), g.boolean(2))
    } else {
        format!(
            "(and (= a (_ bv{} 3)) (= b (_ bv{} 2)) (= f {}))",
            g.rng.gen_range(0..8),
            g.rng.gen_range(0..4),
            g.rng.gen::<bool>()
        )
    };
    let props = [g.boolean(3), g.boolean(3)];
    g.inputs = true;
    let next_a = g.bv(3, 3);
    let next_b = g.bv(2, 3);
    let next_f = g.boolean(2);
    let trans = if relational_trans {
        format!("(and (bvule a.next {}) (= b.next {}) (= f.next {}) (or f.next {}))", next_a, next_b, next_f, g.boolean(2))
    } else {
        format!("(and (= a.next {}) (= b.next {}) (= f.next {}))", next_a, next_b, next_f)
    };
    out += &format!("(define-fun init () Bool (! {} :init))\n", init);
    out += &format!("(define-fun trans () Bool (! {} :trans))\n", trans);
    out += &format!("(define-fun p0 () Bool (! {} :invar-property 0))\n", props[0]);
    out += &format!("(define-fun p1 () Bool (! {} :invar-property 1))\n", props[1]);
    out
}
