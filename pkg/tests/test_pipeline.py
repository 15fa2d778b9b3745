import pytest

from trqg.backend import GenerationClient, RetryPolicy
from trqg.corpus import AnswerSpan
from trqg.errors import ContractViolation
from trqg.mock_server import MockBackendServer, MockFixture
from trqg.pipeline import (
    GeneratedPair,
    PipelineFailure,
    extract_answers,
    generate_qa_pairs,
    generate_question,
)

FAST = RetryPolicy(attempts=2, backoff_base=0.0, timeout=5.0)

CONTEXT = "Ali sabah geldi. Ayşe İzmir'e gitti."

AE_FIXTURES = [
    MockFixture("contains", "<hl> Ali sabah geldi. <hl>", "Ali <sep> sabah"),
    MockFixture("contains", "<hl> Ayşe İzmir'e gitti. <hl>", "İzmir'e <sep> uçakla"),
]
QG_FIXTURES = [
    MockFixture("contains", "<hl> Ali <hl>", "Kim sabah geldi?"),
    MockFixture("contains", "<hl> sabah <hl>", "Ali ne zaman geldi?"),
    MockFixture("contains", "<hl> İzmir'e <hl>", "Ayşe nereye gitti?"),
]


class TestExtractAnswers:
    def test_candidates_located_and_hallucinations_dropped(self):
        with MockBackendServer(AE_FIXTURES) as server:
            answers = extract_answers(CONTEXT, server.endpoint)
        # "uçakla" is not in the context, so it has no span to report
        assert answers == [
            AnswerSpan(text="Ali", answer_start=0),
            AnswerSpan(text="sabah", answer_start=4),
            AnswerSpan(text="İzmir'e", answer_start=22),
        ]

    def test_one_request_covers_all_sentences(self):
        with MockBackendServer(AE_FIXTURES) as server:
            extract_answers(CONTEXT, server.endpoint)
            assert server.generate_calls == 1

    def test_candidate_located_inside_its_own_sentence(self):
        context = "Ali geldi. Ali gitti."
        fixtures = [
            MockFixture("contains", "<hl> Ali geldi. <hl>", "geldi"),
            MockFixture("contains", "<hl> Ali gitti. <hl>", "Ali"),
        ]
        with MockBackendServer(fixtures) as server:
            answers = extract_answers(context, server.endpoint)
        # the second sentence's "Ali" resolves to offset 11, not 0
        assert AnswerSpan(text="Ali", answer_start=11) in answers

    def test_candidate_outside_sentence_found_in_context(self):
        context = "Ali geldi. Ali gitti."
        fixtures = [
            MockFixture("contains", "<hl> Ali geldi. <hl>", "gitti"),
            MockFixture("contains", "<hl> Ali gitti. <hl>", ""),
        ]
        with MockBackendServer(fixtures) as server:
            answers = extract_answers(context, server.endpoint)
        assert answers == [AnswerSpan(text="gitti", answer_start=15)]

    def test_duplicate_candidates_kept_once(self):
        context = "Ali geldi. Ali gitti."
        fixtures = [
            MockFixture("contains", "<hl> Ali geldi. <hl>", "Ali"),
            MockFixture("contains", "<hl> Ali gitti. <hl>", "Ali"),
        ]
        with MockBackendServer(fixtures) as server:
            answers = extract_answers(context, server.endpoint)
        assert answers == [AnswerSpan(text="Ali", answer_start=0)]

    def test_empty_context_skips_backend(self):
        with MockBackendServer() as server:
            assert extract_answers("   ", server.endpoint) == []
            assert server.generate_calls == 0


class TestGenerateQuestion:
    def test_question_for_string_answer(self):
        with MockBackendServer(QG_FIXTURES) as server:
            question = generate_question(CONTEXT, "sabah", server.endpoint)
        assert question == "Ali ne zaman geldi?"

    def test_question_for_answer_span(self):
        with MockBackendServer(QG_FIXTURES) as server:
            question = generate_question(
                CONTEXT, AnswerSpan(text="İzmir'e", answer_start=22), server.endpoint
            )
        assert question == "Ayşe nereye gitti?"

    def test_output_whitespace_stripped(self):
        fixtures = [MockFixture("contains", "<hl> Ali <hl>", "  Kim geldi?  ")]
        with MockBackendServer(fixtures) as server:
            assert generate_question(CONTEXT, "Ali", server.endpoint) == "Kim geldi?"

    def test_prepend_format_used_when_asked(self):
        fixtures = [MockFixture("prefix", "answer: Ali context:", "Soru?")]
        with MockBackendServer(fixtures) as server:
            question = generate_question(
                CONTEXT, "Ali", server.endpoint, qg_format="prepend"
            )
        assert question == "Soru?"

    def test_absent_answer_rejected(self):
        with pytest.raises(ContractViolation):
            generate_question(CONTEXT, "Mehmet", "http://127.0.0.1:9")


class TestGenerateQaPairs:
    def test_both_stages_produce_pairs(self):
        with MockBackendServer(AE_FIXTURES + QG_FIXTURES) as server:
            pairs, failures = generate_qa_pairs(
                CONTEXT, server.endpoint, key="ctx-1"
            )
        assert failures == []
        assert pairs == [
            GeneratedPair(
                key="ctx-1",
                answer="Ali",
                answer_start=0,
                question="Kim sabah geldi?",
                provenance="mock-backend",
            ),
            GeneratedPair(
                key="ctx-1",
                answer="sabah",
                answer_start=4,
                question="Ali ne zaman geldi?",
                provenance="mock-backend",
            ),
            GeneratedPair(
                key="ctx-1",
                answer="İzmir'e",
                answer_start=22,
                question="Ayşe nereye gitti?",
                provenance="mock-backend",
            ),
        ]

    def test_given_answers_skip_extraction(self):
        with MockBackendServer(QG_FIXTURES) as server:
            pairs, failures = generate_qa_pairs(
                CONTEXT,
                server.endpoint,
                key="k",
                answers=[AnswerSpan(text="Ali", answer_start=0)],
            )
            assert server.generate_calls == 1
        assert failures == []
        assert [p.answer for p in pairs] == ["Ali"]

    def test_no_candidates_is_empty_success(self):
        fixtures = [
            MockFixture("contains", "<hl> Ali sabah geldi. <hl>", ""),
            MockFixture("contains", "<hl> Ayşe İzmir'e gitti. <hl>", ""),
        ]
        with MockBackendServer(fixtures) as server:
            assert generate_qa_pairs(CONTEXT, server.endpoint) == ([], [])

    def test_extraction_failure_reported_with_stage(self):
        client = GenerationClient("http://127.0.0.1:9", FAST)
        pairs, failures = generate_qa_pairs(CONTEXT, client, key="dead")
        client.close()
        assert pairs == []
        assert failures == [
            PipelineFailure(key="dead", stage="answer_extraction", detail=failures[0].detail)
        ]
        assert failures[0].detail

    def test_question_failure_reported_with_stage(self):
        client = GenerationClient("http://127.0.0.1:9", FAST)
        pairs, failures = generate_qa_pairs(
            CONTEXT,
            client,
            key="dead",
            answers=[AnswerSpan(text="Ali", answer_start=0)],
        )
        client.close()
        assert pairs == []
        assert [f.stage for f in failures] == ["question_generation"]

    def test_provenance_carries_model_id(self):
        with MockBackendServer(QG_FIXTURES, model_id="tiny-tr") as server:
            pairs, _ = generate_qa_pairs(
                CONTEXT,
                server.endpoint,
                answers=[AnswerSpan(text="Ali", answer_start=0)],
            )
        assert pairs[0].provenance == "tiny-tr"

    def test_repeated_runs_identical(self):
        with MockBackendServer(AE_FIXTURES + QG_FIXTURES) as server:
            first = generate_qa_pairs(CONTEXT, server.endpoint, key="k")
            second = generate_qa_pairs(CONTEXT, server.endpoint, key="k")
        assert first == second

    def test_shared_client_not_closed(self):
        with MockBackendServer(AE_FIXTURES + QG_FIXTURES) as server:
            client = GenerationClient(server.endpoint, FAST)
            generate_qa_pairs(CONTEXT, client)
            # still usable afterwards
            assert client.health() == "mock-backend"
            client.close()
