"""Regenerates tests/fixtures/tiny_xlmr and its reference outputs.

Needs sentencepiece, tokenizers, transformers, torch and safetensors. The
files are committed, so this only has to run when the fixture changes.
"""

import json
import os
import tempfile

import sentencepiece as spm
import torch
from safetensors.torch import save_file
from tokenizers import Tokenizer
from transformers import XLMRobertaConfig, XLMRobertaModel
from transformers.convert_slow_tokenizer import XLMRobertaConverter

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "tiny_xlmr")

CORPUS = """the food was absolutely amazing!
but the staff was so horrible to us.
food was just average... if they lowered the prices just a bit, it would be a bigger draw.
i love this macbook. horrible product. it has and does everything it should.
服务很好，菜也很好吃。价格有点贵。
电池续航时间很长，屏幕很清晰。
The keyboard is full size and the spacing is comfortable.
I ordered a burger medium and got a charred, tasteless hockey puck
"""

PAIRS = [
    ("the food was absolutely amazing!!", "food"),
    ("but the staff was so horrible to us.", "staff"),
    ("  The   keyboard is full size  ", "keyboard"),
    ("服务很好，菜也很好吃。", "服务"),
    ("ｆｏｏｄ was ＡＭＡＺＩＮＧ… 😀 zebra", "NULL"),
    ("屏幕很清晰 and the battery", "电池续航"),
    ("I ordered a burger medium\tand got a charred, tasteless hockey puck", "burger"),
]


class _SlowStandIn:
    mask_token = "<mask>"

    def __init__(self, vocab_file):
        self.vocab_file = vocab_file

    def convert_tokens_to_ids(self, token):
        return 0


def build_tokenizer():
    with tempfile.TemporaryDirectory() as tmp:
        corpus = os.path.join(tmp, "corpus.txt")
        with open(corpus, "w", encoding="utf-8") as f:
            f.write(CORPUS * 20)
        prefix = os.path.join(tmp, "tiny")
        spm.SentencePieceTrainer.train(
            input=corpus, model_prefix=prefix, vocab_size=100, model_type="unigram",
            normalization_rule_name="nmt_nfkc", character_coverage=1.0, num_threads=1,
        )
        tok = XLMRobertaConverter(_SlowStandIn(prefix + ".model")).converted()
    path = os.path.join(OUT, "tokenizer.json")
    tok.save(path)
    return Tokenizer.from_file(path)


def main():
    os.makedirs(OUT, exist_ok=True)
    tok = build_tokenizer()
    vocab_size = tok.get_vocab_size()

    torch.manual_seed(7)
    config = XLMRobertaConfig(
        vocab_size=vocab_size, hidden_size=16, num_hidden_layers=2, num_attention_heads=2,
        intermediate_size=32, max_position_embeddings=130, type_vocab_size=1,
        pad_token_id=1, bos_token_id=0, eos_token_id=2, layer_norm_eps=1e-5,
        hidden_act="gelu", hidden_dropout_prob=0.1, attention_probs_dropout_prob=0.1,
    )
    model = XLMRobertaModel(config, add_pooling_layer=False).eval()
    with torch.no_grad():
        for p in model.parameters():
            p.copy_(torch.randn_like(p) * 0.3)
    state = {k: v.detach().float().contiguous() for k, v in model.state_dict().items() if "position_ids" not in k}
    save_file(state, os.path.join(OUT, "model.safetensors"), metadata={"format": "pt"})
    config.to_json_file(os.path.join(OUT, "config.json"))

    # Reference outputs in double precision from the float32-rounded weights.
    model = model.double()
    with torch.no_grad():
        for name, p in model.state_dict().items():
            if name in state:
                p.copy_(state[name].double())

    cases = []
    for text, aspect in PAIRS:
        text_ids = tok.encode(text, add_special_tokens=False).ids
        aspect_ids = tok.encode(aspect, add_special_tokens=False).ids
        single = [0] + text_ids + [2] + aspect_ids + [2]
        double = [0] + text_ids + [2, 2] + aspect_ids + [2]
        with torch.no_grad():
            h_single = model(torch.tensor([single])).last_hidden_state[0, 0].tolist()
            h_double = model(torch.tensor([double])).last_hidden_state[0, 0].tolist()
        cases.append({
            "text": text, "aspect": aspect,
            "text_ids": text_ids, "aspect_ids": aspect_ids,
            "text_pieces": tok.encode(text, add_special_tokens=False).tokens,
            "single_separator_ids": single, "double_separator_ids": double,
            "first_token_single": h_single, "first_token_double": h_double,
        })
    with open(os.path.join(HERE, "tiny_xlmr_expected.json"), "w", encoding="utf-8") as f:
        json.dump({"vocab_size": vocab_size, "cases": cases}, f, ensure_ascii=False, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
