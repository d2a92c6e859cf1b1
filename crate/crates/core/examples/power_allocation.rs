//! The PU-protecting power split on a single link: the PU constraint binds
//! exactly and the SU gets whatever power is left.

use crnoma::noma::{achievable_gamma_s, optimal_b, sinr_pu, sinr_su_decode_pu, snr_su, LinkState};

fn main() {
    let gamma_p_th = 1.0;
    for (h, g, rho) in [(1.0, 0.5, 10.0), (0.05, 0.05, 10.0), (2.0, 3.0, 100.0), (1e9, 1e9, 10.0)] {
        let link = LinkState::new(h, g, rho);
        let split = optimal_b(&link, gamma_p_th);
        println!(
            "h={h:<6} g={g:<6} rho={rho:<5} b={:.6} sinr_pu={:.4} sinr_su(p)={:.4} snr_su={:.4} closed form={:.4}",
            split.b(),
            sinr_pu(&link, &split),
            sinr_su_decode_pu(&link, &split),
            snr_su(&link, &split),
            achievable_gamma_s(&link, gamma_p_th),
        );
    }
}
