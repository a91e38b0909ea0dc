//! Turns a small position log into contact intervals at a 250 m range.

use ofpc::trace::{extract_contacts, parse_positions};

const POSITIONS: &str = "\
# node,t,x,y
0,0,0,0
0,10,0,0
0,20,0,0
0,30,0,0
1,0,600,0
1,10,200,0
1,20,150,0
1,30,700,0
2,0,100,50
2,30,100,50
";

fn main() {
    let samples = parse_positions(POSITIONS).expect("well-formed positions");
    let trace = extract_contacts(&samples, 250.0).expect("positive range");
    print!("{}", trace.to_csv());
}
