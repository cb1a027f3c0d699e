// Point-to-point heterodyne key rates β·I_AB − χ in bits/symbol, V_A = 4, β = 0.9586.
// Rows T = 0.9, 0.7, 0.5, 0.3, 0.1; columns ε = 0, 0.02, 0.05, 0.07, 0.1.
// Generated by an independent closed-form script from the two-eigenvalue Holevo formula.

pub const GRID_T: [f64; 5] = [0.9, 0.7, 0.5, 0.3, 0.1];
pub const GRID_EPS: [f64; 5] = [0.0, 0.02, 0.05, 0.07, 0.1];
pub const GRID_V_A: f64 = 4.0;
pub const GRID_BETA: f64 = 0.9586;
/// Ideal detector η = 1, v_el = 0.
pub const IDEAL: [[f64; 5]; 5] = [
    [1.0225025380702881, 0.8499634625934769, 0.6696231482375302, 0.569544810443852, 0.4380596511206889],
    [0.5860604953615337, 0.4828306282480639, 0.3717573591381178, 0.308555360783058, 0.22367157786896863],
    [0.33604375108173434, 0.27228975149235546, 0.20144906799835316, 0.16033129721128925, 0.10424108803372834],
    [0.16729902224377524, 0.13184618065382736, 0.0910422814941203, 0.06689105678810703, 0.033460878946782624],
    [0.046720583291179785, 0.034634283704351565, 0.020043173029600903, 0.011190113463764084, -0.0012859267308187317],
];
/// Trusted detector η = 0.56, v_el = 0.31.
pub const TRUSTED: [[f64; 5]; 5] = [
    [0.5943028208095783, 0.48928583139545007, 0.3859526113004731, 0.3306140407900371, 0.2598194325412252],
    [0.3183084363797267, 0.2616075229378002, 0.20393514420643444, 0.17208098556021556, 0.1301823953282566],
    [0.17391845126628802, 0.14152440554192774, 0.1071843434931401, 0.08771801490432296, 0.06158782134325691],
    [0.08348620767369247, 0.06656074883047397, 0.0477758594936476, 0.036852607406949234, 0.02191262783969883],
    [0.022761129360011928, 0.017258663813250433, 0.010771925065215127, 0.006880800460227404, 0.0014398066894795725],
];
