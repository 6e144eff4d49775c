# ladris/dataset/clients/openai.py

import base64
from typing import Any, Dict, List, Optional

import logfire
import openai
from openai import OpenAI

from ...exceptions import ClientTimeoutError, ClientTransportError, MalformedResponseError
from .base import BaseCaptionerClient, CaptionRequest
from .imaging import to_png_bytes

SYSTEM_PROMPT = (
    "You write referring expressions for objects in low-altitude drone images. "
    "The first image is a close-up crop of one object. The second image is the full scene "
    "with that object outlined by a red box. Write one short English phrase that names the "
    "object's category once and uniquely identifies it in the full scene through its color, "
    "size and position. Do not mention the red box. Answer with the phrase only."
)


class OpenAICaptionerClient(BaseCaptionerClient):
    """Captioner backed by any OpenAI-compatible vision chat endpoint."""

    def __init__(
            self,
            api_key: Optional[str],
            model: str,
            base_url: Optional[str] = None,
            timeout_seconds: float = 30.0,
            client: Optional[Any] = None
    ):
        self.model = model
        self.timeout_seconds = timeout_seconds
        if client is None:
            # local servers accept any key
            client = OpenAI(api_key=api_key or "EMPTY", base_url=base_url, timeout=timeout_seconds, max_retries=0)
            logfire.instrument_openai(client)
        self.client = client
        logfire.info("OpenAI captioner initialized", model=model, base_url=base_url)

    @staticmethod
    def _format_images(request: CaptionRequest) -> List[Dict]:
        return [{
            "type": "image_url",
            "image_url": {
                "url": f"data:image/png;base64,{base64.b64encode(to_png_bytes(img)).decode('utf-8')}"
            }
        } for img in (request.crop_image, request.marked_image)]

    def describe(self, request: CaptionRequest) -> str:
        messages = [
            {"role": "system", "content": SYSTEM_PROMPT},
            {"role": "user", "content": self._format_images(request)},
        ]
        try:
            response = self.client.chat.completions.create(
                model=self.model,
                messages=messages,
                max_tokens=64,
                temperature=0,
                timeout=self.timeout_seconds,
            )
        except openai.APITimeoutError as e:
            raise ClientTimeoutError(f"Captioner timed out after {self.timeout_seconds}s: {str(e)}")
        except (openai.APIConnectionError, openai.APIStatusError) as e:
            raise ClientTransportError(f"Captioner request failed: {str(e)}")

        try:
            content = response.choices[0].message.content
        except (AttributeError, IndexError, TypeError) as e:
            raise MalformedResponseError(f"Captioner response has no message content: {str(e)}")
        if not isinstance(content, str) or not content.strip():
            raise MalformedResponseError("Captioner returned an empty expression")

        return " ".join(content.strip().strip('"').split())
