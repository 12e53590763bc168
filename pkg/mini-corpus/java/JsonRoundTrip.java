package demo.json;

import com.google.gson.Gson;

public class JsonRoundTrip {
    public String encode(Object payload) {
        Gson gson = new Gson();
        return gson.toJson(payload);
    }
}
