//! Hand derivation of the k = 1 operator from classical 3×3 rotations.
//!
//! Uses only plain arrays, no irrep machinery: S is the quarter turn about y,
//! T the sixth turn about x, and the operator is the average of the eight
//! daughter orientations 1, 1, 1, S²T³, T⁴, T⁴S², S, ST³.
//!
//!     cargo run -p quaquaversal --example golden_k1

type M3 = [[f64; 3]; 3];

fn mul(a: &M3, b: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

fn pow(a: &M3, e: u32) -> M3 {
    (0..e).fold(
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        |acc, _| mul(&acc, a),
    )
}

fn main() {
    let h = 3f64.sqrt() / 2.0;
    // Quarter turn about y and sixth turn about x.
    let s: M3 = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]];
    let t: M3 = [[1.0, 0.0, 0.0], [0.0, 0.5, -h], [0.0, h, 0.5]];

    let terms = [
        ("1", pow(&s, 0)),
        ("1", pow(&s, 0)),
        ("1", pow(&s, 0)),
        ("S^2 T^3", mul(&pow(&s, 2), &pow(&t, 3))),
        ("T^4", pow(&t, 4)),
        ("T^4 S^2", mul(&pow(&t, 4), &pow(&s, 2))),
        ("S", s),
        ("S T^3", mul(&s, &pow(&t, 3))),
    ];

    let mut z = [[0.0; 3]; 3];
    for (name, m) in &terms {
        let tr = m[0][0] + m[1][1] + m[2][2];
        println!("{name:>8}: trace {tr:+.6}  {m:?}");
        for i in 0..3 {
            for j in 0..3 {
                z[i][j] += m[i][j] / 8.0;
            }
        }
    }
    println!();
    println!("8·z =");
    for row in &z {
        println!(
            "  [{:+.6}, {:+.6}, {:+.6}]",
            8.0 * row[0],
            8.0 * row[1],
            8.0 * row[2]
        );
    }
    println!(
        "trace z = {:.15} (7/8 = {})",
        z[0][0] + z[1][1] + z[2][2],
        7.0 / 8.0
    );
    println!(
        "z is lower triangular, so its eigenvalues are the diagonal: {}, {}, {}",
        z[0][0], z[1][1], z[2][2]
    );
}
