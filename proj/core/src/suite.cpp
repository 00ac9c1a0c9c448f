#include "witloc/bench.hpp"

#include <stdexcept>

namespace witloc {

namespace {

// Small synchronous designs covering the usual bug shapes: swapped case
// arms, wrong constants in assignments, negated branch conditions and
// off-by-one constants, on both combinational-style lookup logic and
// multi-cycle state machines.

const char* kDecoderSrc = R"(module decoder_3_to_8(input [2:0] sel, input en, output reg [7:0] y);
  always @(posedge clk) begin
    if (en) begin
      case (sel)
        3'd0: y <= 8'd1;
        3'd1: y <= 8'd2;
        3'd2: y <= 8'd4;
        3'd3: y <= 8'd8;
        3'd4: y <= 8'd16;
        3'd5: y <= 8'd32;
        3'd6: y <= 8'd64;
        3'd7: y <= 8'd128;
      endcase
    end else begin
      y <= 8'd0;
    end
  end
endmodule
)";

const char* kAluSrc = R"(module alu(input [3:0] opcode, input [7:0] a, input [7:0] b, output reg [7:0] y);
  always @(posedge clk) begin
    case (opcode)
      4'b0000: y <= a + b;
      4'b0001: y <= a - b;
      4'b0010: y <= a & b;
      4'b0011: y <= a | b;
      4'b0100: y <= a ^ b;
      4'b0101: y <= a << 1;
      4'b0110: y <= a >> 1;
      default: y <= 8'd0;
    endcase
  end
endmodule
)";

const char* kCounterSrc = R"(module counter(input rst, input en, input up, output reg [3:0] count, output reg wrap);
  always @(posedge clk) begin
    if (rst) begin
      count <= 4'd0;
      wrap <= 1'b0;
    end else if (en) begin
      if (up) begin
        if (count == 4'd15) begin
          count <= 4'd0;
          wrap <= 1'b1;
        end else begin
          count <= count + 1;
          wrap <= 1'b0;
        end
      end else if (count == 4'd0) begin
        count <= 4'd15;
        wrap <= 1'b1;
      end else begin
        count <= count - 1;
        wrap <= 1'b0;
      end
    end
  end
endmodule
)";

const char* kLedControllerSrc = R"(module led_controller(input rst, input mode, input [3:0] level, output reg led, output reg [3:0] duty);
  reg [3:0] phase;
  always @(posedge clk) begin
    if (rst) begin
      phase <= 4'd0;
      duty <= 4'd0;
      led <= 1'b0;
    end else begin
      phase <= phase + 1;
      if (mode) begin
        duty <= level;
      end else begin
        duty <= 4'd8;
      end
      if (phase < duty) begin
        led <= 1'b1;
      end else begin
        led <= 1'b0;
      end
    end
  end
endmodule
)";

const char* kFsmSrc = R"(module fsm_4(input rst, input in1, input in2, output done, output busy);
  reg [1:0] state;
  reg done_r;
  assign done = done_r;
  assign busy = state != 2'd0;
  always @(posedge clk) begin
    if (rst) begin
      state <= 2'd0;
      done_r <= 1'b0;
    end else begin
      done_r <= 1'b0;
      case (state)
        2'd0: begin
          if (in1) begin
            state <= 2'd1;
          end
        end
        2'd1: begin
          if (in1 && in2) begin
            state <= 2'd2;
          end else begin
            state <= 2'd0;
          end
        end
        2'd2: begin
          if (in2) begin
            state <= 2'd3;
          end else begin
            state <= 2'd1;
          end
        end
        2'd3: begin
          state <= 2'd0;
          done_r <= 1'b1;
        end
      endcase
    end
  end
endmodule
)";

const char* kI2cSrc = R"(module i2c_ctrl(input rst, input start, input ack, output scl_oen, output sda_oen, output busy);
  reg scl_r = 1'd1;
  reg sda_r = 1'd1;
  reg [1:0] st;
  assign scl_oen = scl_r;
  assign sda_oen = sda_r;
  assign busy = st != 2'd0;
  always @(posedge clk) begin
    if (rst) begin
      st <= 2'd0;
      scl_r <= 1'b1;
      sda_r <= 1'b1;
    end else begin
      case (st)
        2'd0: begin
          if (start) begin
            st <= 2'd1;
            sda_r <= 1'b0;
          end
        end
        2'd1: begin
          scl_r <= 1'b1;
          st <= 2'd2;
        end
        2'd2: begin
          if (ack) begin
            st <= 2'd3;
            scl_r <= 1'b0;
          end
        end
        2'd3: begin
          st <= 2'd0;
          scl_r <= 1'b1;
          sda_r <= 1'b1;
        end
      endcase
    end
  end
endmodule
)";

TestCase make_case(const Design& design, const std::string& id,
                   std::vector<std::vector<uint64_t>> rows) {
  TestCase t;
  t.id = id;
  for (int i : design.input_indices) t.signals.push_back(design.signals[i].name);
  for (auto& row : rows) {
    if (row.size() != t.signals.size())
      throw std::runtime_error("suite case " + id + ": bad row width");
    t.cycles.push_back(std::move(row));
  }
  return t;
}

BugSpec assign_bug(const Design& d, const std::string& name, BugEdit edit,
                   const std::string& target_text, uint64_t new_value = 0, int occurrence = 0) {
  BugSpec spec;
  spec.name = name;
  spec.edit = edit;
  spec.target_statement = find_statement(d, target_text, occurrence);
  spec.new_value = new_value;
  return spec;
}

BugSpec swap_bug(const Design& d, const std::string& name, const std::string& arm_a,
                 const std::string& arm_b) {
  BugSpec spec;
  spec.name = name;
  spec.edit = BugEdit::SwapCaseArms;
  spec.target_statement = find_statement(d, arm_a);
  spec.other_statement = find_statement(d, arm_b);
  return spec;
}

BugSpec off_by_one_bug(const Design& d, const std::string& name, const std::string& target_text,
                       int occurrence, int64_t delta) {
  BugSpec spec;
  spec.name = name;
  spec.edit = BugEdit::OffByOneConstant;
  spec.target_statement = find_statement(d, target_text);
  spec.constant_occurrence = occurrence;
  spec.delta = delta;
  return spec;
}

SuiteEntry make_decoder() {
  SuiteEntry e;
  e.design_name = "decoder_3_to_8";
  e.golden = parse_design(kDecoderSrc, "decoder_3_to_8.mv");
  const Design& d = e.golden;

  e.bugs.push_back({assign_bug(d, "arm3_wrong_const", BugEdit::WrongAssignConstant,
                               "y <= 8'd8;", 16),
                    make_case(d, "decoder_arm3",
                              {{3, 1}, {1, 1}, {2, 1}, {3, 1}, {0, 1}, {7, 1}, {4, 1}, {0, 0}})});
  e.bugs.push_back({swap_bug(d, "swap_arms_5_6", "3'd5:", "3'd6:"),
                    make_case(d, "decoder_swap56",
                              {{5, 1}, {2, 1}, {4, 1}, {1, 1}, {0, 0}, {7, 1}, {3, 1}, {0, 1}})});
  e.bugs.push_back({off_by_one_bug(d, "arm0_off_by_one", "y <= 8'd1;", 0, 1),
                    make_case(d, "decoder_arm0",
                              {{0, 1}, {4, 1}, {0, 1}, {2, 1}, {6, 1}, {1, 1}, {0, 0}, {5, 1}})});
  e.bugs.push_back({assign_bug(d, "idle_wrong_const", BugEdit::WrongAssignConstant,
                               "y <= 8'd0;", 255),
                    make_case(d, "decoder_idle",
                              {{1, 1}, {0, 0}, {3, 1}, {2, 1}, {0, 1}, {5, 1}, {6, 1}, {7, 1}})});
  return e;
}

SuiteEntry make_alu() {
  SuiteEntry e;
  e.design_name = "alu";
  e.golden = parse_design(kAluSrc, "alu.mv");
  const Design& d = e.golden;

  // the swap cases drive one of the two affected arms, the way a triggering
  // testbench usually finds such bugs
  e.bugs.push_back({swap_bug(d, "swap_add_sub", "4'b0000:", "4'b0001:"),
                    make_case(d, "alu_addsub",
                              {{0, 5, 3}, {2, 9, 4}, {4, 12, 10}, {6, 3, 3}, {3, 8, 0},
                               {7, 6, 2}, {5, 1, 1}})});
  e.bugs.push_back({swap_bug(d, "swap_and_or", "4'b0010:", "4'b0011:"),
                    make_case(d, "alu_andor",
                              {{2, 12, 10}, {0, 1, 2}, {4, 7, 7}, {5, 2, 0}, {6, 8, 8},
                               {7, 0, 0}, {1, 9, 3}})});
  e.bugs.push_back({off_by_one_bug(d, "shift_off_by_one", "y <= a << 1;", 0, 1),
                    make_case(d, "alu_shift",
                              {{5, 3, 0}, {5, 9, 2}, {0, 4, 4}, {6, 8, 1}, {2, 1, 7},
                               {3, 6, 6}, {1, 9, 3}})});
  e.bugs.push_back({assign_bug(d, "default_wrong_const", BugEdit::WrongAssignConstant,
                               "y <= 8'd0;", 255),
                    make_case(d, "alu_default",
                              {{9, 1, 2}, {0, 3, 4}, {2, 5, 5}, {1, 6, 2}, {3, 3, 3},
                               {4, 2, 0}, {6, 7, 1}})});
  return e;
}

SuiteEntry make_counter() {
  SuiteEntry e;
  e.design_name = "counter";
  e.golden = parse_design(kCounterSrc, "counter.mv");
  const Design& d = e.golden;

  std::vector<std::vector<uint64_t>> count_up_18;
  count_up_18.push_back({1, 0, 0});
  for (int i = 0; i < 17; ++i) count_up_18.push_back({0, 1, 1});

  // occurrence 0 of the wrap pulse sits on the count == 15 branch
  e.bugs.push_back({assign_bug(d, "wrap_pulse_lost", BugEdit::WrongAssignConstant,
                               "wrap <= 1'b1;", 0, 0),
                    make_case(d, "counter_wrap", count_up_18)});
  e.bugs.push_back({assign_bug(d, "direction_negated", BugEdit::NegateCondition, "if (up)"),
                    make_case(d, "counter_dir",
                              {{1, 0, 0}, {0, 1, 1}, {0, 0, 1}, {0, 1, 0}, {0, 0, 0},
                               {0, 1, 1}, {0, 0, 0}, {0, 0, 1}})});
  e.bugs.push_back({off_by_one_bug(d, "wrap_threshold_off", "if (count == 4'd15)", 0, -1),
                    make_case(d, "counter_thresh", count_up_18)});
  return e;
}

SuiteEntry make_led_controller() {
  SuiteEntry e;
  e.design_name = "led_controller";
  e.golden = parse_design(kLedControllerSrc, "led_controller.mv");
  const Design& d = e.golden;

  auto warmup = [](std::vector<uint64_t> row, int n) {
    std::vector<std::vector<uint64_t>> rows;
    rows.push_back({1, 0, 0});
    for (int i = 0; i < n; ++i) rows.push_back(row);
    return rows;
  };

  e.bugs.push_back({assign_bug(d, "default_duty_wrong", BugEdit::WrongAssignConstant,
                               "duty <= 4'd8;", 2),
                    make_case(d, "led_duty",
                              {{1, 0, 0}, {0, 1, 6}, {0, 1, 6}, {0, 0, 9}, {0, 1, 6},
                               {0, 1, 7}, {0, 1, 6}, {0, 1, 5}, {0, 1, 6}, {0, 1, 6}})});
  e.bugs.push_back({off_by_one_bug(d, "phase_step_off", "phase <= phase + 1;", 0, 1),
                    make_case(d, "led_phase", warmup({0, 1, 8}, 7))});
  e.bugs.push_back({assign_bug(d, "reset_duty_wrong", BugEdit::WrongAssignConstant,
                               "duty <= 4'd0;", 9),
                    make_case(d, "led_rst", warmup({0, 1, 5}, 7))});
  e.bugs.push_back({assign_bug(d, "led_stuck_off", BugEdit::WrongAssignConstant,
                               "led <= 1'b1;", 0),
                    make_case(d, "led_stuck",
                              {{1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 1, 0}, {0, 1, 0},
                               {0, 1, 9}, {0, 1, 9}})});
  return e;
}

SuiteEntry make_fsm() {
  SuiteEntry e;
  e.design_name = "fsm_4";
  e.golden = parse_design(kFsmSrc, "fsm_4.mv");
  const Design& d = e.golden;

  e.bugs.push_back({assign_bug(d, "wrong_next_state", BugEdit::WrongNextStateConstant,
                               "state <= 2'd2;", 0),
                    make_case(d, "fsm_next",
                              {{1, 0, 0}, {0, 1, 0}, {0, 1, 1}, {0, 0, 1}, {0, 1, 0},
                               {0, 0, 0}, {0, 1, 0}, {0, 0, 1}})});
  // "state <= 2'd1;" occurrence 1 is the fallback inside the third arm
  e.bugs.push_back({assign_bug(d, "wrong_fallback_state", BugEdit::WrongNextStateConstant,
                               "state <= 2'd1;", 3, 1),
                    make_case(d, "fsm_fallback",
                              {{1, 0, 0}, {0, 1, 0}, {0, 1, 1}, {0, 1, 0}, {0, 0, 1},
                               {0, 1, 1}, {0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}})});
  e.bugs.push_back({assign_bug(d, "accept_negated", BugEdit::NegateCondition, "if (in2)"),
                    make_case(d, "fsm_accept",
                              {{1, 0, 0}, {0, 1, 0}, {0, 1, 1}, {0, 1, 1}, {0, 0, 0},
                               {0, 1, 0}, {0, 0, 1}, {0, 0, 0}})});
  // a longer walk (accept, fall back, accept again) so witness quality
  // varies with how much of the prefix a mutant preserves
  e.bugs.push_back({assign_bug(d, "done_pulse_lost", BugEdit::WrongAssignConstant,
                               "done_r <= 1'b1;", 0),
                    make_case(d, "fsm_done",
                              {{1, 0, 0}, {0, 1, 0}, {0, 1, 1}, {0, 0, 0}, {0, 1, 1},
                               {0, 1, 1}, {0, 0, 0}, {0, 0, 0}, {0, 1, 0}, {0, 0, 1},
                               {0, 0, 0}, {0, 1, 0}})});
  return e;
}

SuiteEntry make_i2c() {
  SuiteEntry e;
  e.design_name = "i2c_ctrl";
  e.golden = parse_design(kI2cSrc, "i2c_ctrl.mv");
  const Design& d = e.golden;

  // a single transaction: start pulse, one ack while transferring, then idle
  std::vector<std::vector<uint64_t>> one_txn = {
      {1, 0, 0}, {0, 1, 0}, {0, 0, 0}, {0, 0, 1}, {0, 0, 0},
      {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 1}, {0, 0, 0}};

  // occurrence 1 of the scl raise is the one inside the transfer arm
  e.bugs.push_back({assign_bug(d, "scl_held_low", BugEdit::WrongAssignConstant,
                               "scl_r <= 1'b1;", 0, 1),
                    make_case(d, "i2c_scl", one_txn)});
  e.bugs.push_back({assign_bug(d, "retry_instead_of_stop", BugEdit::WrongNextStateConstant,
                               "st <= 2'd3;", 1),
                    make_case(d, "i2c_retry", one_txn)});
  e.bugs.push_back({assign_bug(d, "ack_negated", BugEdit::NegateCondition, "if (ack)"),
                    make_case(d, "i2c_ack", one_txn)});
  return e;
}

}  // namespace

std::vector<SuiteEntry> builtin_suite() {
  std::vector<SuiteEntry> suite;
  suite.push_back(make_decoder());
  suite.push_back(make_alu());
  suite.push_back(make_counter());
  suite.push_back(make_led_controller());
  suite.push_back(make_fsm());
  suite.push_back(make_i2c());
  return suite;
}

std::vector<SuiteEntry> builtin_easy_suite() {
  std::vector<SuiteEntry> suite;
  suite.push_back(make_decoder());
  suite.push_back(make_alu());
  return suite;
}

}  // namespace witloc
