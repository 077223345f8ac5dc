//! Drive the command-line front end in-process.

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = exceptional::cli::run(["exc", "local", "--poly", "[3,11,-7,-1,1]", "--p", "59"], &mut out, &mut err);
    println!("exit {code}");
    print!("{}", String::from_utf8_lossy(&out));
}
