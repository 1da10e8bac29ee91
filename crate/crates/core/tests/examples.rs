//! Every example compiles into this target and must run to completion.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(special_functions);
example!(partition_polynomials);
example!(phase_functions);
example!(boundary_curves);
example!(polynomial_roots);
example!(attractor_distance);
example!(asymptotics);
example!(invariant_checks);
example!(command_line);
