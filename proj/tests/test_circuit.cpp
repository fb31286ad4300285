#include <catch2/catch_amalgamated.hpp>

#include "qksvm/circuit.hpp"
#include "qksvm/errors.hpp"

using namespace qksvm;

TEST_CASE("gate constructors fill the expected fields") {
    const Gate p = Gate::phase(2, 0.5);
    CHECK(p.kind == GateKind::Phase);
    CHECK(p.q0 == 2);
    CHECK(p.q1 == -1);
    CHECK(p.angle == 0.5);

    const Gate cx = Gate::cnot(0, 3);
    CHECK(cx.kind == GateKind::Cnot);
    CHECK(cx.q0 == 0);
    CHECK(cx.q1 == 3);
    CHECK(is_two_qubit(cx.kind));
    CHECK_FALSE(is_two_qubit(GateKind::Rz));
}

TEST_CASE("circuit add validates qubit indices") {
    Circuit c(3);
    CHECK_NOTHROW(c.add(Gate::h(0)).add(Gate::cnot(0, 2)));
    CHECK_THROWS_AS(c.add(Gate::x(3)), UsageError);
    CHECK_THROWS_AS(c.add(Gate::x(-1)), UsageError);
    CHECK_THROWS_AS(c.add(Gate::cnot(1, 3)), UsageError);
    CHECK_THROWS_AS(c.add(Gate::cnot(1, 1)), UsageError);
    CHECK_THROWS_AS(c.add(Gate::swap(2, 2)), UsageError);
    CHECK(c.gates.size() == 2); // failed adds must not append
}

TEST_CASE("gate inverse negates rotation angles only") {
    CHECK(inverse(Gate::phase(1, 0.7)).angle == -0.7);
    CHECK(inverse(Gate::rz(0, -1.2)).angle == 1.2);
    CHECK(inverse(Gate::h(0)).kind == GateKind::H);
    CHECK(inverse(Gate::x(0)).kind == GateKind::X);
    CHECK(inverse(Gate::cnot(0, 1)).q0 == 0);
    CHECK(inverse(Gate::swap(0, 1)).kind == GateKind::Swap);
}

TEST_CASE("inverted circuit reverses gate order and inverts each gate") {
    Circuit c(2);
    c.add(Gate::h(0)).add(Gate::phase(1, 0.3)).add(Gate::cnot(0, 1));
    const Circuit inv = inverted(c);
    REQUIRE(inv.gates.size() == 3);
    CHECK(inv.n_qubits == 2);
    CHECK(inv.gates[0].kind == GateKind::Cnot);
    CHECK(inv.gates[1].kind == GateKind::Phase);
    CHECK(inv.gates[1].angle == -0.3);
    CHECK(inv.gates[2].kind == GateKind::H);
}

TEST_CASE("concatenated requires matching widths and preserves order") {
    Circuit a(2);
    a.add(Gate::h(0));
    Circuit b(2);
    b.add(Gate::x(1));
    const Circuit ab = concatenated(a, b);
    REQUIRE(ab.gates.size() == 2);
    CHECK(ab.gates[0].kind == GateKind::H);
    CHECK(ab.gates[1].kind == GateKind::X);

    Circuit wide(3);
    CHECK_THROWS_AS(concatenated(a, wide), UsageError);
}

TEST_CASE("bell circuit is H on qubit 0 then CNOT(0,1)") {
    const Circuit bell = bell_circuit();
    CHECK(bell.n_qubits == 2);
    REQUIRE(bell.gates.size() == 2);
    CHECK(bell.gates[0].kind == GateKind::H);
    CHECK(bell.gates[0].q0 == 0);
    CHECK(bell.gates[1].kind == GateKind::Cnot);
    CHECK(bell.gates[1].q0 == 0);
    CHECK(bell.gates[1].q1 == 1);
}
