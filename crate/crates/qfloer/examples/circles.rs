// temp probe: print boundary circle orders for ring(1), ring(2)
use qfloer::scaffold::{self, Scaffold};

fn walk(sc: &Scaffold, start: usize) -> Vec<String> {
    let mut out = vec![];
    let mut d = start;
    loop {
        out.push(sc.darts[d].label.clone());
        d = sc.next_boundary(d);
        if d == start { break; }
    }
    out
}

fn main() {
    for m in [1usize, 2, 3] {
        let mut sc = Scaffold::new();
        let ids = scaffold::ring_into(&mut sc, m, "");
        println!("== ring({}) vertex circle from c_plus[0]:", m);
        println!("{:?}", walk(&sc, ids.c_plus[0]));
        println!("== ring({}) inner circle from inner[0]:", m);
        println!("{:?}", walk(&sc, ids.inner[0]));
    }
}
