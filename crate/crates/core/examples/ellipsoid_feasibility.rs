//! Intersection of ellipsoids: `min_x max_i 1/2 x'A_i x + b_i'x + c_i` with a
//! prox adapted to the instance, solved by the inexact adaptive method.
//! The generated instance is written to and read back from a text file.

use std::fs::File;
use std::io::BufReader;

use relbreg::bench::default_l0;
use relbreg::oracles::io::{read_instance, write_instance, Instance};
use relbreg::oracles::{generate_iep, iep_oracle};
use relbreg::solvers::alg4_inexact;
use relbreg::{DVector, RunConfig};

fn main() -> relbreg::Result<()> {
    let (n, m) = (20, 5);
    let inst = generate_iep(n, m, 42)?;
    let path = std::env::temp_dir().join("relbreg-iep-example.txt");
    write_instance(&mut File::create(&path)?, &Instance::Iep(inst.clone()))?;
    let Instance::Iep(loaded) = read_instance(BufReader::new(File::open(&path)?))? else {
        unreachable!("wrote an IEP instance");
    };
    assert_eq!(loaded, inst);
    println!("instance round-tripped through {}", path.display());

    let obj = iep_oracle(&loaded)?;
    let x0 = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let l0 = default_l0(|x| obj.subgrad(x), n, n, &x0);
    println!("sigma {:.3}, rho {:.3}, gamma {:.3}, R^2 {:.3}", inst.sigma, inst.rho, inst.gamma, inst.r_sq());

    let rep = alg4_inexact(&obj, &RunConfig::new(0.05, l0, x0, inst.r_sq()), 2000)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "N", "L_N", "certificate", "f_best");
    for k in [10, 100, 500, 1000, 2000] {
        let r = &rep.log[k - 1];
        println!("{k:>6} {:>12.4e} {:>12.4e} {:>12.4e}", r.l, r.certificate, r.f_best.unwrap());
    }
    println!("sum inner - 2N = {} = log2(L_N / L_0)", rep.inner_excess());
    Ok(())
}
