//! Independent eighth-order finite-difference evaluation of the local
//! quantum-spin model, compared against the spectral right-hand side.

use spinqdd::fields::{Grid2D, ScalarField, SpinField};
use spinqdd::fluid::{rhs_local, FluidParams};
use std::f64::consts::PI;

const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

#[derive(Clone)]
struct Fd {
    n: usize,
    v: Vec<f64>,
}

impl Fd {
    fn sample(n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let h = 2.0 * PI / n as f64;
        let v = (0..n * n).map(|i| f((i % n) as f64 * h, (i / n) as f64 * h)).collect();
        Self { n, v }
    }

    fn at(&self, i: isize, j: isize) -> f64 {
        let n = self.n as isize;
        self.v[(i.rem_euclid(n) + n * j.rem_euclid(n)) as usize]
    }

    fn build(&self, f: impl Fn(isize, isize) -> f64) -> Self {
        let n = self.n;
        Self { n, v: (0..n * n).map(|i| f((i % n) as isize, (i / n) as isize)).collect() }
    }

    fn d(&self, axis: usize) -> Self {
        let h = 2.0 * PI / self.n as f64;
        self.build(|i, j| {
            let mut acc = 0.0;
            for (s, c) in D1.iter().enumerate() {
                let s = s as isize + 1;
                acc += c * if axis == 0 {
                    self.at(i + s, j) - self.at(i - s, j)
                } else {
                    self.at(i, j + s) - self.at(i, j - s)
                };
            }
            acc / h
        })
    }

    fn dd(&self, axis: usize) -> Self {
        let h = 2.0 * PI / self.n as f64;
        self.build(|i, j| {
            let mut acc = D2[0] * self.at(i, j);
            for (s, c) in D2.iter().enumerate().skip(1) {
                let s = s as isize;
                acc += c * if axis == 0 {
                    self.at(i + s, j) + self.at(i - s, j)
                } else {
                    self.at(i, j + s) + self.at(i, j - s)
                };
            }
            acc / (h * h)
        })
    }

    fn lap(&self) -> Self {
        self.dd(0).zip(&self.dd(1), |a, b| a + b)
    }

    fn hess(&self, a: usize, b: usize) -> Self {
        if a == b {
            self.dd(a)
        } else {
            self.d(0).d(1)
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, v: self.v.iter().map(|&a| f(a)).collect() }
    }

    fn zip(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self { n: self.n, v: self.v.iter().zip(&o.v).map(|(&a, &b)| f(a, b)).collect() }
    }
}

fn add(a: &Fd, b: &Fd) -> Fd {
    a.zip(b, |x, y| x + y)
}

fn mul(a: &Fd, b: &Fd) -> Fd {
    a.zip(b, |x, y| x * y)
}

fn scale(a: &Fd, c: f64) -> Fd {
    a.map(|x| c * x)
}

fn div(f: [Fd; 2]) -> Fd {
    add(&f[0].d(0), &f[1].d(1))
}

fn cross(a: &[Fd; 3], b: &[Fd; 3]) -> [Fd; 3] {
    let c = |i: usize, j: usize| mul(&a[i], &b[j]).zip(&mul(&a[j], &b[i]), |x, y| x - y);
    [c(1, 2), c(2, 0), c(0, 1)]
}

struct Case {
    eps: f64,
    alpha: f64,
    tau: f64,
}

fn n0f(x: f64, y: f64) -> f64 {
    2.0 + 0.5 * (x + y).cos()
}
fn nf(j: usize, x: f64, y: f64) -> f64 {
    match j {
        0 => 0.3 * x.sin(),
        1 => 0.2 * y.cos(),
        _ => 0.25 * (x - y).sin(),
    }
}
fn vf(x: f64, y: f64) -> f64 {
    0.4 * (2.0 * x - y).cos()
}

fn fd_rhs(n: usize, c: &Case) -> [Fd; 4] {
    let (eps, alpha, tau) = (c.eps, c.alpha, c.tau);
    let n0 = Fd::sample(n, n0f);
    let nv = [0, 1, 2].map(|j| Fd::sample(n, move |x, y| nf(j, x, y)));
    let v = Fd::sample(n, vf);
    let dv = [v.d(0), v.d(1)];
    let inv = n0.map(|a| 1.0 / a);

    let s = n0.map(f64::sqrt);
    let q = mul(&s.lap(), &s.map(|a| 1.0 / a));
    let dq = [q.d(0), q.d(1)];
    let charge_flux = [0, 1].map(|k| {
        let f = add(&n0.d(k), &mul(&n0, &dv[k]));
        f.zip(&mul(&n0, &dq[k]), |a, b| a - eps * eps / 6.0 * b)
    });
    let r0 = scale(&div(charge_flux), tau);

    let g = [0, 1].map(|k| mul(&n0.d(k), &inv));
    let b = [0, 1, 2].map(|j| mul(&nv[j], &inv));
    let gsq = add(&mul(&g[0], &g[0]), &mul(&g[1], &g[1]));
    let bsq = add(&add(&mul(&b[0], &b[0]), &mul(&b[1], &b[1])), &mul(&b[2], &b[2]));
    let dn = [0, 1, 2].map(|j| [nv[j].d(0), nv[j].d(1)]);
    let lap0 = mul(&n0.lap(), &inv);
    let a_coef = [0, 1].map(|k| {
        let mut a = scale(&mul(&gsq, &g[k]), 2.0);
        for j in 0..3 {
            a = a.zip(&mul(&mul(&b[j], &dn[j][k]), &inv), |x, y| x - 4.0 * y);
        }
        a = a.zip(&mul(&g[k], &lap0), |x, y| x - y);
        for l in 0..2 {
            a = a.zip(&mul(&g[l], &mul(&n0.hess(l, k), &inv)), |x, y| x - y);
        }
        a
    });
    let b_coef = [0, 1, 2].map(|j| {
        let grad_dot = add(&mul(&dn[j][0], &g[0]), &mul(&dn[j][1], &g[1]));
        mul(&nv[j].lap(), &inv).zip(&mul(&grad_dot, &inv), |x, y| x - y)
    });
    let c_coef = |l: usize, k: usize| {
        let h = mul(&n0.hess(l, k), &inv);
        if l == k {
            add(&add(&lap0, &scale(&bsq, 4.0)).zip(&gsq, |x, y| x - y), &h)
        } else {
            h
        }
    };
    let d_coef = |j: usize, k: usize| {
        let first = add(&mul(&g[0], &nv[j].hess(0, k)), &mul(&g[1], &nv[j].hess(1, k)));
        let gd = add(&mul(&dn[j][0], &g[0]), &mul(&dn[j][1], &g[1]));
        first.zip(&mul(&gd, &g[k]), |x, y| x - y)
    };

    // ∇⊥f = (∂2 f, −∂1 f, 0); ∇⊥×n = (−∂1 n3, −∂2 n3, ∂1 n1 + ∂2 n2)
    let curl = [scale(&nv[2].d(0), -1.0), scale(&nv[2].d(1), -1.0), add(&nv[0].d(0), &nv[1].d(1))];
    let gperp = [v.d(1), scale(&v.d(0), -1.0), v.map(|_| 0.0)];
    let gate = cross(&gperp, &nv);
    let nxb = cross(&nv, &b_coef);
    let inner = cross(&b, &b_coef);
    let e3 = cross(&nv, &[0, 1, 2].map(|j| inner[j].zip(&b_coef[j], |x, y| x - y)));
    let relax = [1.0, 1.0, 2.0];

    let spin = [0, 1, 2].map(|j| {
        let drift = div([0, 1].map(|k| add(&dn[j][k], &mul(&nv[j], &dv[k]))));
        let lapn = nv[j].lap();
        let flux = [0, 1].map(|k| {
            let mut f = mul(&nv[j], &a_coef[k]).zip(&lapn.d(k), |x, y| x - y);
            for l in 0..2 {
                f = add(&f, &mul(&dn[j][l], &c_coef(l, k)));
            }
            add(&add(&f, &mul(&b_coef[j], &n0.d(k))), &d_coef(j, k))
        });
        let fl = div(flux);
        let mut out = scale(&drift, tau);
        let terms: [(&Fd, f64); 6] = [
            (&curl[j], -4.0 * alpha * tau),
            (&gate[j], -2.0 * alpha * tau),
            (&nv[j], -4.0 * alpha * alpha * tau * relax[j]),
            (&nxb[j], eps * eps / 6.0),
            (&fl, eps * eps * tau / 12.0),
            (&e3[j], eps.powi(3) * tau / 3.0),
        ];
        for (t, c) in terms {
            out = out.zip(t, |x, y| x + c * y);
        }
        out
    });
    let [s1, s2, s3] = spin;
    [r0, s1, s2, s3]
}

fn spectral_rhs(n: usize, c: &Case) -> [ScalarField; 4] {
    let g = Grid2D::square(n).unwrap();
    let state = SpinField::new(
        ScalarField::from_fn(g, n0f),
        [0, 1, 2].map(|j| ScalarField::from_fn(g, move |x, y| nf(j, x, y))),
        c.eps,
    );
    let p = FluidParams::new(c.eps, c.alpha, c.tau, ScalarField::from_fn(g, vf));
    rhs_local(&state, &p).unwrap()
}

fn max_error(fd: &[Fd; 4], reference: &[ScalarField; 4], nref: usize) -> f64 {
    let n = fd[0].n;
    let stride = nref / n;
    let mut err = 0.0f64;
    for k in 0..4 {
        for j in 0..n {
            for i in 0..n {
                let r = reference[k].values[i * stride + nref * j * stride];
                err = err.max((fd[k].v[i + n * j] - r).abs());
            }
        }
    }
    err
}

#[test]
fn local_rhs_matches_eighth_order_finite_differences() {
    let case = Case { eps: 0.3, alpha: 0.7, tau: 0.8 };
    let nref = 128;
    let reference = spectral_rhs(nref, &case);
    let errs: Vec<f64> = [32, 64].iter().map(|&n| max_error(&fd_rhs(n, &case), &reference, nref)).collect();
    let order = (errs[0] / errs[1]).log2();
    assert!(errs[1] < 1e-6, "fd error {errs:?}");
    assert!((order - 8.0).abs() < 1.0, "observed order {order}, errors {errs:?}");
}

#[test]
fn spectral_rhs_is_resolved_at_moderate_grid() {
    let case = Case { eps: 0.3, alpha: 0.7, tau: 0.8 };
    let fine = spectral_rhs(128, &case);
    let coarse = spectral_rhs(64, &case);
    let mut err = 0.0f64;
    for k in 0..4 {
        for j in 0..64 {
            for i in 0..64 {
                err = err.max((coarse[k].values[i + 64 * j] - fine[k].values[2 * i + 256 * j]).abs());
            }
        }
    }
    assert!(err < 1e-10, "{err}");
}
