//! Test-only dense linear algebra used as an independent oracle.

pub(crate) mod dense {
    use num_complex::Complex64;

    use crate::pauli::PauliOperator;

    #[derive(Clone, Debug)]
    pub struct CMatrix {
        pub dim: usize,
        pub data: Vec<Complex64>,
    }

    impl CMatrix {
        pub fn zeros(dim: usize) -> Self {
            CMatrix {
                dim,
                data: vec![Complex64::new(0.0, 0.0); dim * dim],
            }
        }

        pub fn identity(dim: usize) -> Self {
            let mut m = CMatrix::zeros(dim);
            for i in 0..dim {
                m.data[i * dim + i] = Complex64::new(1.0, 0.0);
            }
            m
        }

        pub fn from_rows<const D: usize>(rows: &[[Complex64; D]; D]) -> Self {
            let mut m = CMatrix::zeros(D);
            for (i, row) in rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    m.data[i * D + j] = *v;
                }
            }
            m
        }

        pub fn get(&self, i: usize, j: usize) -> Complex64 {
            self.data[i * self.dim + j]
        }

        pub fn matmul(&self, other: &CMatrix) -> CMatrix {
            let d = self.dim;
            let mut out = CMatrix::zeros(d);
            for i in 0..d {
                for k in 0..d {
                    let a = self.data[i * d + k];
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        out.data[i * d + j] += a * other.data[k * d + j];
                    }
                }
            }
            out
        }

        pub fn dagger(&self) -> CMatrix {
            let d = self.dim;
            let mut out = CMatrix::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    out.data[j * d + i] = self.data[i * d + j].conj();
                }
            }
            out
        }

        pub fn kron(&self, other: &CMatrix) -> CMatrix {
            let (a, b) = (self.dim, other.dim);
            let d = a * b;
            let mut out = CMatrix::zeros(d);
            for i1 in 0..a {
                for j1 in 0..a {
                    let v = self.data[i1 * a + j1];
                    for i2 in 0..b {
                        for j2 in 0..b {
                            out.data[(i1 * b + i2) * d + (j1 * b + j2)] =
                                v * other.data[i2 * b + j2];
                        }
                    }
                }
            }
            out
        }

        pub fn scale(&self, s: Complex64) -> CMatrix {
            CMatrix {
                dim: self.dim,
                data: self.data.iter().map(|v| v * s).collect(),
            }
        }

        pub fn sub(&self, other: &CMatrix) -> CMatrix {
            CMatrix {
                dim: self.dim,
                data: self
                    .data
                    .iter()
                    .zip(&other.data)
                    .map(|(a, b)| a - b)
                    .collect(),
            }
        }

        pub fn max_abs(&self) -> f64 {
            self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
        }

        pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
            self.dim == other.dim && self.sub(other).max_abs() <= tol
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn letter_matrix(ch: char) -> CMatrix {
        match ch {
            'I' => CMatrix::identity(2),
            'X' => CMatrix::from_rows(&[[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]),
            'Y' => CMatrix::from_rows(&[[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]]),
            'Z' => CMatrix::from_rows(&[[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]]),
            _ => unreachable!(),
        }
    }

    /// Dense matrix with qubit 0 as the least significant index bit.
    pub fn pauli_matrix(p: &PauliOperator) -> CMatrix {
        let letters: Vec<char> = p.letters().chars().collect();
        let mut m = CMatrix::identity(1);
        for &ch in letters.iter().rev() {
            m = m.kron(&letter_matrix(ch));
        }
        m.scale(c(p.sign() as f64, 0.0))
    }

    /// Embeds a one-qubit gate on qubit `q` of `n`.
    pub fn one_qubit(n: usize, q: usize, g: &CMatrix) -> CMatrix {
        let id = CMatrix::identity(2);
        let mut m = CMatrix::identity(1);
        for k in (0..n).rev() {
            m = m.kron(if k == q { g } else { &id });
        }
        m
    }

    pub fn hadamard() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_rows(&[[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]])
    }

    pub fn phase_s() -> CMatrix {
        CMatrix::from_rows(&[[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 1.)]])
    }

    /// Controlled gates built from computational-basis action.
    pub fn cnot(n: usize, ctrl: usize, tgt: usize) -> CMatrix {
        let d = 1 << n;
        let mut m = CMatrix::zeros(d);
        for b in 0..d {
            let out = if (b >> ctrl) & 1 == 1 {
                b ^ (1 << tgt)
            } else {
                b
            };
            m.data[out * d + b] = c(1., 0.);
        }
        m
    }

    pub fn cz(n: usize, a: usize, b: usize) -> CMatrix {
        let d = 1 << n;
        let mut m = CMatrix::zeros(d);
        for s in 0..d {
            let v = if (s >> a) & 1 == 1 && (s >> b) & 1 == 1 {
                -1.
            } else {
                1.
            };
            m.data[s * d + s] = c(v, 0.);
        }
        m
    }
}
