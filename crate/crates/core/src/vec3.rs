//! Small fixed-size vector helpers shared across the crate.

pub type IVec = [i32; 3];
pub type FVec = [f64; 3];

pub fn iadd(a: IVec, b: IVec) -> IVec {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn isub(a: IVec, b: IVec) -> IVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn ineg(a: IVec) -> IVec {
    [-a[0], -a[1], -a[2]]
}

/// True iff `a` is one of the six unit lattice steps.
pub fn is_unit_step(a: IVec) -> bool {
    a[0].abs() + a[1].abs() + a[2].abs() == 1
}

pub fn fsub(a: FVec, b: FVec) -> FVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn fadd(a: FVec, b: FVec) -> FVec {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn fscale(a: FVec, c: f64) -> FVec {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn dot(a: FVec, b: FVec) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: FVec, b: FVec) -> FVec {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: FVec) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: FVec, b: FVec) -> f64 {
    norm(fsub(a, b))
}

pub fn normalize(a: FVec) -> FVec {
    let n = norm(a);
    fscale(a, 1.0 / n)
}
