use nalgebra::{Matrix3, Vector3};

/// Radial / transverse / normal basis as the columns of a rotation matrix
/// mapping RTN components to inertial components.
pub fn rtn_basis(r: &Vector3<f64>, v: &Vector3<f64>) -> Matrix3<f64> {
    let r_hat = r.normalize();
    let n_hat = r.cross(v).normalize();
    let t_hat = n_hat.cross(&r_hat);
    Matrix3::from_columns(&[r_hat, t_hat, n_hat])
}

pub fn rtn_to_inertial(r: &Vector3<f64>, v: &Vector3<f64>, a_rtn: &Vector3<f64>) -> Vector3<f64> {
    rtn_basis(r, v) * a_rtn
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn basis_is_orthonormal_and_right_handed() {
        let r = Vector3::new(6800.0, 120.0, -300.0);
        let v = Vector3::new(0.2, 7.5, 1.1);
        let m = rtn_basis(&r, &v);
        assert_relative_eq!(m.transpose() * m, Matrix3::identity(), epsilon = 1e-14);
        assert_relative_eq!(m.determinant(), 1.0, epsilon = 1e-14);
        // Velocity has no normal component and a positive transverse one.
        let v_rtn = m.transpose() * v;
        assert!(v_rtn.z.abs() < 1e-12);
        assert!(v_rtn.y > 0.0);
    }
}
